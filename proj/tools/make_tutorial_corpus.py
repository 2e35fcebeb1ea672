#!/usr/bin/env python3
"""Writes the bundled tutorial corpus: synthetic health/economy/sports news
items dated across 2020, some mentioning China or the United States.

Output is deterministic for a given --seed. The generated text is dedicated to
the public domain (CC0).
"""

import argparse
import datetime
import json
import math
import random

PLACES_CHINA = ["Beijing", "Shanghai", "Wuhan", "Guangzhou", "Shenzhen"]
PLACES_US = ["Washington", "New York", "Chicago", "Houston", "Seattle"]
PLACES_OTHER = ["London", "Berlin", "Nairobi", "Lima", "Jakarta", "Toronto", "Madrid"]

HEALTH_NOUNS = ["disease", "illness", "infection", "fever", "cough", "headache", "injury", "cancer",
                "symptoms", "diagnosis", "treatment", "medicine", "vaccine", "hospital", "clinic",
                "patients", "doctors", "nurses", "pharmacy", "drugs", "syndrome", "immunity",
                "pain", "nausea", "rehabilitation", "therapy", "surgery", "infections", "diseases"]
HEALTH_VERBS = ["treated", "diagnosed", "vaccinated", "hospitalized", "examined", "healed", "injured",
                "infected", "tested", "screened"]
ECONOMY = ["exports", "prices", "markets", "investors", "growth", "trade", "factories", "banks",
           "shares", "currency", "tariffs", "revenue", "profits", "jobs", "wages", "budget"]
SPORTS = ["team", "match", "league", "season", "players", "coach", "goal", "stadium", "fans",
          "tournament", "victory", "final", "record", "title"]
GENERIC = ["officials", "residents", "experts", "reporters", "leaders", "workers", "students",
           "families", "authorities", "volunteers", "companies", "citizens"]
ADJ = ["new", "local", "national", "major", "recent", "strong", "large", "small", "early", "public"]

HEALTH_TEMPLATES = [
    "{Gen} in {place} reported more {h1} among {gen2} this week.",
    "{Adj} {h1} cases rose as {h2} spread in {place}.",
    "Doctors at a {place} hospital {hv} dozens of patients with {h1} and {h2}.",
    "The {adj} clinic offered {h1} {h2} to {gen2} in {place}.",
    "Nurses said {h1} and {h2} were common among {gen2}.",
    "{Gen} urged {gen2} to seek {h1} early to prevent {h2}.",
    "A study found that {h1} often follows {h2} in older patients.",
    "Patients {hv} for {h1} were moved to a {adj} hospital.",
    "Doctors in {place} celebrated a success against {h1}.",
    "{Gen} praised the progress in reducing {h1} and called it a victory.",
]
ECONOMY_TEMPLATES = [
    "{Gen} in {place} said {e1} and {e2} improved this quarter.",
    "{Adj} {e1} lifted {e2} across {place}.",
    "Analysts expect {e1} to slow as {e2} weaken in {place}.",
    "{Gen} discussed {e1} and {e2} at a meeting in {place}.",
]
SPORTS_TEMPLATES = [
    "The {place} {s1} won the {s2} after a {adj} {s3}.",
    "{Gen} in {place} celebrated the {s1} and its {s2}.",
    "The {s1} set a {adj} {s2} in front of {s3} in {place}.",
]
NEUTRAL_TEMPLATES = [
    "{Gen} in {place} gathered on {day}.",
    "It was a {adj} day for {gen2} in {place}.",
    "{Gen} said the weather in {place} would stay {adj2}.",
]
DAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]
WEATHER = ["mild", "cold", "warm", "dry", "wet", "calm"]


def fill(template, rng, place):
    gen = rng.choice(GENERIC)
    values = {
        "Gen": gen.capitalize(),
        "gen2": rng.choice(GENERIC),
        "place": place,
        "adj": rng.choice(ADJ),
        "Adj": rng.choice(ADJ).capitalize(),
        "adj2": rng.choice(WEATHER),
        "h1": rng.choice(HEALTH_NOUNS),
        "h2": rng.choice(HEALTH_NOUNS),
        "hv": rng.choice(HEALTH_VERBS),
        "e1": rng.choice(ECONOMY),
        "e2": rng.choice(ECONOMY),
        "s1": rng.choice(SPORTS),
        "s2": rng.choice(SPORTS),
        "s3": rng.choice(SPORTS),
        "day": rng.choice(DAYS),
    }
    return template.format(**values)


def health_share(day, china):
    # An outbreak curve that peaks earlier for China-related news.
    peak = 45 if china else 100
    return 0.15 + 0.55 * math.exp(-0.5 * ((day - peak) / 25.0) ** 2)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--docs", type=int, default=600)
    parser.add_argument("--seed", type=int, default=2020)
    parser.add_argument("--out", default="data/tutorial/corpus.jsonl")
    args = parser.parse_args()

    rng = random.Random(args.seed)
    start = datetime.date(2020, 1, 1)
    with open(args.out, "w", encoding="utf-8") as out:
        for i in range(args.docs):
            day = rng.randrange(0, 182)
            region = rng.choices(["china", "us", "other"], weights=[0.35, 0.3, 0.35])[0]
            pool = {"china": PLACES_CHINA, "us": PLACES_US, "other": PLACES_OTHER}[region]
            share = health_share(day, region == "china")
            sentences = []
            for _ in range(rng.randint(4, 9)):
                place = rng.choice(pool)
                u = rng.random()
                if u < share:
                    template = rng.choice(HEALTH_TEMPLATES)
                elif u < share + (1 - share) * 0.45:
                    template = rng.choice(ECONOMY_TEMPLATES)
                elif u < share + (1 - share) * 0.8:
                    template = rng.choice(SPORTS_TEMPLATES)
                else:
                    template = rng.choice(NEUTRAL_TEMPLATES)
                sentences.append(fill(template, rng, place))
            if region == "china" and rng.random() < 0.5:
                sentences.append(rng.choice(["Chinese officials declined to comment.",
                                             "China said it would share more data."]))
            record = {
                "id": "tut%04d" % (i + 1),
                "date": (start + datetime.timedelta(days=day)).isoformat(),
                "text": " ".join(sentences),
            }
            out.write(json.dumps(record) + "\n")


if __name__ == "__main__":
    main()
