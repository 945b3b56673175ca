"""Writes the gate training texts: policies/ and three non-policy sets
(landing/, long_landing/, subsites/). Deterministic; rerun after editing the
phrase banks.
"""
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))

POLICY = [
    "We collect information you provide when you create an account, such as your name and email address.",
    "We automatically collect certain information about your device, including your IP address and browser type.",
    "We use cookies and similar technologies to remember your preferences and to understand how our services are used.",
    "We may share your personal information with service providers who process it on our behalf.",
    "We do not sell your personal information to third parties.",
    "You may access, correct or delete your personal information by contacting us.",
    "We retain personal data only for as long as necessary to fulfil the purposes described in this policy.",
    "We implement appropriate technical and organisational measures to protect your personal data.",
    "Our services are not directed to children under the age of thirteen.",
    "We may update this privacy policy from time to time and will notify you of material changes.",
    "If you have questions about this policy, please contact our data protection officer.",
    "Where required by law, we will ask for your consent before processing your personal data.",
    "Your information may be transferred to and processed in countries other than your own.",
    "You can opt out of receiving marketing emails by following the unsubscribe link in each message.",
    "Third-party advertising partners may collect information about your activities across websites.",
    "We may disclose information if required to do so by law or in response to a valid legal request.",
    "You have the right to lodge a complaint with a supervisory authority.",
    "We use analytics providers to help us measure traffic and usage trends for the service.",
    "Some browsers offer a do not track setting; our website does not currently respond to such signals.",
    "The legal basis for processing is our legitimate interest in providing and improving the service.",
]
POLICY_HEADINGS = ["Privacy Policy", "Privacy Notice", "Privacy Statement", "Data Protection Policy",
                   "Information We Collect", "How We Use Your Information", "Your Choices", "Contact Us"]

NAV = ["Home", "Shop", "Deals", "Sign in", "Register", "Cart", "Help", "Search", "Menu", "Account",
       "News", "Sports", "Weather", "Video", "Music", "Games", "Travel", "Login", "Subscribe", "Follow us"]
TEASERS = [
    "New arrivals are here, shop the latest styles now.",
    "Free shipping on orders over fifty dollars.",
    "Download our app for exclusive offers.",
    "Breaking: city council approves new stadium plan.",
    "Watch the highlights from last night's game.",
    "Top ten destinations for your summer holiday.",
    "Sign up for our newsletter and save ten percent.",
    "Stream thousands of movies and shows today.",
    "Meet the team behind our award-winning products.",
    "Limited time offer: two for one on all accessories.",
    "Scores, schedules and standings for every league.",
    "Recipes of the week: quick dinners for busy families.",
]
ARTICLE = [
    "The company reported strong quarterly results, driven by growth in its cloud business.",
    "Local volunteers spent the weekend cleaning up the riverbank after the storm.",
    "Researchers say the new battery design could double the range of electric cars.",
    "The museum's new exhibition brings together paintings from five centuries.",
    "Fans lined the streets to welcome the team home after the championship win.",
    "Experts recommend stretching before and after every run to prevent injuries.",
    "The festival returns next month with more than two hundred performers.",
    "Prices for fresh vegetables rose sharply after a dry summer.",
    "A new bike lane network will connect the city's largest parks.",
    "The startup raised funding to expand its delivery service to new cities.",
    "Scientists observed a rare comet passing close to the earth.",
    "The school district announced new programs for music and art education.",
]
SUBSITE = [
    "Our company was founded with a simple idea: make great products that people love.",
    "We are hiring engineers, designers and customer support specialists in several offices.",
    "To reset your password, click forgot password on the sign in page and follow the instructions.",
    "Orders usually ship within two business days and arrive within a week.",
    "You can return most items within thirty days of delivery for a full refund.",
    "Our support team is available by chat every day from eight in the morning until midnight.",
    "The product is made from recycled aluminium and comes with a two year warranty.",
    "Visit our stores in more than forty cities or find a retailer near you.",
    "Our mission is to connect people with the information they need every day.",
    "Read the latest announcements from our press office and download our media kit.",
    "Frequently asked questions about billing, delivery and account settings are answered below.",
    "Join our community forum to share tips and get help from other customers.",
]


def write(folder, name, text):
    path = os.path.join(HERE, folder)
    os.makedirs(path, exist_ok=True)
    with open(os.path.join(path, name), "w", encoding="utf-8") as f:
        f.write(text.strip() + "\n")


def main():
    rng = random.Random(20210601)
    for i in range(24):
        paras = [rng.choice(POLICY_HEADINGS)]
        for _ in range(rng.randint(3, 5)):
            paras.append(" ".join(rng.sample(POLICY, rng.randint(2, 4))))
        write("policies", f"policy_{i:02d}.txt", "\n\n".join(paras))
    for i in range(24):
        nav = " ".join(rng.sample(NAV, rng.randint(6, 12)))
        write("landing", f"landing_{i:02d}.txt", nav + "\n\n" + "\n".join(rng.sample(TEASERS, rng.randint(2, 5))))
    for i in range(24):
        nav = " ".join(rng.sample(NAV, rng.randint(8, 14)))
        body = "\n\n".join(" ".join(rng.sample(ARTICLE, rng.randint(3, 6))) for _ in range(rng.randint(4, 7)))
        write("long_landing", f"long_landing_{i:02d}.txt",
              nav + "\n\n" + "\n".join(rng.sample(TEASERS, 4)) + "\n\n" + body)
    for i in range(24):
        body = "\n\n".join(" ".join(rng.sample(SUBSITE, rng.randint(2, 4))) for _ in range(rng.randint(2, 5)))
        write("subsites", f"subsite_{i:02d}.txt", body)


if __name__ == "__main__":
    main()
