#!/usr/bin/env python3
"""Regenerate the checked-in fixtures under data/.

Deterministic: rerunning produces identical files. Embedding fixtures are
built separately by hashed_bow.py once `adtext ingest` has written sentences.
"""

import csv
import json
import random
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
rng = random.Random(20240611)


def normalize_title(title):
    out, depth = [], 0
    for c in title:
        if c in "([{":
            depth += 1
        elif c in ")]}":
            depth = max(0, depth - 1)
        elif depth:
            continue
        elif c.isalnum():
            out.append(c.lower())
        else:
            out.append(" ")
    return " ".join("".join(out).split())


def write(path, text):
    path = DATA / path
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def write_csv(path, header, rows):
    path = DATA / path
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_jsonl(path, rows):
    write(path, "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in rows))


# Label sets. Member statements double as the text the sample ads paraphrase.
SKILL_SETS = {
    "S1.2.1": [
        "communicate clearly with customers and coworkers",
        "strong written and verbal communication skills",
        "explain technical information to a general audience",
    ],
    "S2.4.3": [
        "analyze data to identify trends and patterns",
        "build reports and dashboards from large datasets",
        "use statistical methods to interpret data",
    ],
    "S3.1.7": [
        "provide friendly customer service at the register",
        "resolve customer complaints in a professional manner",
        "greet customers and answer their questions",
    ],
}

TASK_SETS = {
    "33-2011.00:T1": ["participate in firefighting efforts", "respond to fire alarms and fight fires"],
    "33-2011.00:T2": [
        "drive and operate fire fighting vehicles and equipment",
        "operate pumps and hoses on fire apparatus",
    ],
    "29-1141.00:T1": [
        "monitor patient vital signs and record changes",
        "administer medications to patients as prescribed",
    ],
}

# Paraphrases of members, used as augmentation candidates.
CANDIDATES = [
    "communicate clearly with customers and with coworkers",
    "excellent written and verbal communication skills",
    "explain technical information to a general audience clearly",
    "analyze data to identify trends and patterns over time",
    "build reports and dashboards from very large datasets",
    "use statistical methods to interpret survey data",
    "provide friendly customer service at the front register",
    "resolve customer complaints in a calm professional manner",
    "greet customers warmly and answer their questions",
    "communicate with vendors about delivery schedules",
    "operate a forklift in a warehouse setting",
    "maintain accurate inventory records",
    "clean and sanitize work surfaces daily",
    "write software in python and sql",
    "lift up to fifty pounds repeatedly",
    "data entry into spreadsheets",
    "trends in retail customer demand",
    "customer questions about billing",
    "prepare meals according to recipes",
    "schedule appointments for patients",
]

US_STATES = ["CA", "TX", "NY", "FL", "OH", "WA", "IL", "GA", "PA", "NC"]
ZIP_PREFIX = {"CA": "94", "TX": "75", "NY": "10", "FL": "33", "OH": "43", "WA": "98", "IL": "60", "GA": "30", "PA": "19", "NC": "27"}

FIRM_STEMS = [
    "Acme", "Blue Ridge", "Cedar", "Delta", "Evergreen", "Falcon", "Granite", "Harbor", "Ironwood", "Juniper",
    "Keystone", "Lakeside", "Maple", "Northstar", "Oakmont", "Pioneer", "Quarry", "Redwood", "Summit", "Tidewater",
]
FIRM_KINDS = ["Logistics", "Health", "Foods", "Analytics", "Fire Services", "Retail", "Manufacturing", "Staffing", "Software", "Hospitality"]
FIRM_SUFFIX = ["Inc", "LLC", "Corp", "Co", "Incorporated", "Company", "Corporation", "Ltd"]
NAICS_BY_KIND = {
    "Logistics": "493110", "Health": "622110", "Foods": "311999", "Analytics": "541511", "Fire Services": "922160",
    "Retail": "452319", "Manufacturing": "332710", "Staffing": "561320", "Software": "511210", "Hospitality": "721110",
}


def establishments():
    rows = []
    for i in range(200):
        stem = FIRM_STEMS[i % len(FIRM_STEMS)]
        kind = FIRM_KINDS[(i // len(FIRM_STEMS)) % len(FIRM_KINDS)]
        suffix = FIRM_SUFFIX[i % len(FIRM_SUFFIX)]
        state = US_STATES[(i * 7) % len(US_STATES)]
        zip_code = ZIP_PREFIX[state] + f"{(i * 37) % 1000:03d}"
        naics = NAICS_BY_KIND[kind]
        rows.append([f"E{i:04d}", f"{stem} {kind} {suffix}", zip_code, state, naics, ""])
    # Same name in several places, so the tier cascade has something to choose between.
    rows.append(["E0900", "Summit Health Inc", "94001", "CA", "622110", ""])
    rows.append(["E0901", "Summit Health Inc", "75002", "TX", "621111", ""])
    rows.append(["E0902", "Summit Health Inc", "10003", "NY", "621399", ""])
    rows.append(["E0903", "Seven Hills Bakery LLC", "43010", "OH", "311811", ""])
    return rows


def wage_cases():
    """(text, expected) pairs; expected is None for sentences that must not parse."""
    cases = []
    hourly_cues = ["per hour", "an hour", "/hr", "/hour", "hourly", "per hr", "a hour"]
    weekly_cues = ["per week", "a week", "/week", "weekly"]
    monthly_cues = ["per month", "a month", "/month", "monthly", "/mo"]
    annual_cues = ["per year", "a year", "/yr", "annually", "yearly", "per annum", "annual"]
    leads = ["Pay: ", "Salary: ", "We pay ", "Compensation is ", "Starting wage ", "Earn ", "", "Rate of pay: "]
    seps = [" - ", "-", " to ", " – ", " — "]

    def money(cents, comma=True):
        d, c = divmod(cents, 100)
        whole = f"{d:,}" if comma else str(d)
        return f"${whole}.{c:02d}" if c else f"${whole}"

    def add(text, lo_text, hi_text, lo, hi, freq, low_conf=False):
        cases.append(
            {
                "text": text,
                "expected": {
                    "min_span": lo_text,
                    "max_span": hi_text,
                    "min": lo,
                    "max": hi,
                    "frequency": freq,
                    "low_confidence": low_conf,
                },
            }
        )

    for _ in range(40):
        lo = rng.randrange(1200, 3500) // 25 * 25
        hi = lo + rng.randrange(1, 12) * 50
        cue = rng.choice(hourly_cues)
        lead = rng.choice(leads)
        if rng.random() < 0.5:
            a, b = money(lo), money(hi)
            text = f"{lead}{a}{rng.choice(seps)}{b} {cue}."
            add(text, a, b, lo / 100, hi / 100, "hourly")
        else:
            a = money(lo)
            text = f"{lead}{a} {cue}."
            add(text, a, a, lo / 100, lo / 100, "hourly")
    for _ in range(25):
        lo = rng.randrange(35, 150) * 1000
        hi = lo + rng.randrange(1, 40) * 1000
        cue = rng.choice(annual_cues)
        lead = rng.choice(leads)
        form = rng.randrange(4)
        if form == 0:
            a, b = f"${lo:,}", f"${hi:,}"
            add(f"{lead}{a}{rng.choice(seps)}{b} {cue}.", a, b, lo, hi, "annually")
        elif form == 1:
            a, b = f"${lo // 1000}k", f"${hi // 1000}k"
            add(f"{lead}{a}{rng.choice(seps)}{b} {cue}.", a, b, lo, hi, "annually")
        elif form == 2:
            a, b = f"${lo // 1000}", f"{hi // 1000}k"
            add(f"{lead}{a}-{b} {cue}.", a, b, lo, hi, "annually")
        else:
            a, b = f"${lo:,}", f"${hi:,}"
            add(f"Salary between {a} and {b} {cue}.", a, b, lo, hi, "annually")
    for _ in range(20):
        v = rng.randrange(600, 2500) // 10 * 10
        cue = rng.choice(weekly_cues)
        a = f"${v:,}"
        add(f"{rng.choice(leads)}{a} {cue}.", a, a, v, v, "weekly")
    for _ in range(20):
        lo = rng.randrange(2500, 7000) // 50 * 50
        hi = lo + rng.randrange(1, 10) * 100
        cue = rng.choice(monthly_cues)
        a, b = f"${lo:,}", f"${hi:,}"
        add(f"{rng.choice(leads)}{a}{rng.choice(seps)}{b} {cue}.", a, b, lo, hi, "monthly")
    # Bare numbers anchored by a frequency cue.
    for _ in range(15):
        lo = rng.randrange(14, 30)
        hi = lo + rng.randrange(1, 6)
        add(f"Earn {lo} to {hi} {rng.choice(['an hour', 'per hour', 'hourly'])}.", str(lo), str(hi), lo, hi, "hourly")
    # No cue at all: magnitude decides and the result is marked low confidence.
    for v, freq in [(1800, "hourly"), (1950, "hourly"), (2400, "hourly"), (350000, "monthly"), (420000, "monthly"),
                    (900000, "monthly"), (4500000, "annually"), (6200000, "annually"), (8800000, "annually"),
                    (12000000, "annually")]:
        a = money(v)
        add(f"Starting pay is {a}.", a, a, v / 100, v / 100, freq, True)
    # Cue placed before the amount.
    for _ in range(10):
        v = rng.randrange(1500, 2800)
        a = money(v)
        add(f"Hourly rate: {a}.", a, a, v / 100, v / 100, "hourly")
    # Trailing context after the cue and mid-sentence wages.
    for _ in range(20):
        lo = rng.randrange(1500, 2600)
        hi = lo + rng.randrange(100, 600)
        a, b = money(lo), money(hi)
        tail = rng.choice([" depending on experience", " plus benefits", ", paid weekly", " DOE", " with overtime available"])
        add(f"This role pays {a} - {b} per hour{tail}.", a, b, lo / 100, hi / 100, "hourly")
    # Currency word between the amount and its cue.
    for _ in range(10):
        v = rng.randrange(40, 120) * 1000
        a = f"${v:,}"
        add(f"Up to {a} USD per year.", a, a, v, v, "annually")
    for _ in range(10):
        lo = rng.randrange(700, 1500) // 10 * 10
        hi = lo + rng.randrange(1, 10) * 25
        a, b = f"${lo:,}", f"${hi:,}"
        add(f"{rng.choice(leads)}{a} to {b}/wk.", a, b, lo, hi, "weekly")
    # Sentences that must not yield a wage.
    negatives = [
        "We have 401(k) matching.",
        "Generous 401k plan with company match.",
        "403(b) retirement plan available.",
        "Call 555-1200 for details.",
        "Lift up to 50 pounds.",
        "Must have 3 years of experience.",
        "Pay is $20 or $25 depending on shift.",
        "Rate of pay: $25 - $20 per hour.",
        "Drive a 5km route each day.",
        "Work 40 hours per week.",
        "Team of 12 people.",
        "Open 7 days a week.",
        "Apply by March 15.",
        "Bonus of $500 and relocation of $2,000.",
        "Suite 200, Building 4.",
        "Requires 2 references.",
        "Competitive pay and benefits.",
        "Up to 10 percent travel.",
        "Located 30 minutes from downtown.",
        "Join our team of 150 nurses.",
    ]
    for t in negatives:
        cases.append({"text": t, "expected": None})
    assert len(cases) == 200, len(cases)
    return cases


AD_TITLES = [
    "Data Analyst",
    "Senior Data Analyst",
    "Registered Nurse - $5,000 Sign-On Bonus",
    "Seasonal Part-Time Cashier",
    "Firefighter",
    "Firefighter / EMT",
    "Chief Executive Officer",
    "Marketing Intern",
    "Warehouse Supervisor",
    "Assistant Store Manager",
    "Software Engineer (Remote)",
    "Customer Service Representative",
    "General Manager",
    "Line Cook",
    "Director of Nursing",
]

SENTENCE_POOL = {
    "skill": [
        "You must have the ability to communicate clearly with customers and coworkers.",
        "Candidates need strong written and verbal communication skills.",
        "Ability to analyze data to identify trends and patterns.",
        "Experience with building reports and dashboards from large datasets.",
        "Knowledge of statistical methods to interpret data is a plus.",
        "Ability to provide friendly customer service at the register.",
        "Skills in resolving customer complaints in a professional manner.",
        "Ability to lift heavy boxes and stand for long periods.",
    ],
    "task": [
        "You will participate in firefighting efforts.",
        "You will respond to fire alarms and fight fires.",
        "Responsible for driving and operating fire fighting vehicles and equipment.",
        "You will monitor patient vital signs and record changes.",
        "Duties include administering medications to patients as prescribed.",
        "You will greet customers and answer their questions.",
        "Responsible for scheduling staff and ordering supplies.",
    ],
    "benefits": [
        "We offer health insurance, dental insurance and paid time off.",
        "Benefits include a 401(k) with company match and tuition reimbursement.",
        "Employees receive paid time off and health insurance.",
    ],
    "education": [
        "A bachelor's degree in a related field is required.",
        "High school diploma or GED required.",
        "Master's degree preferred.",
    ],
    "shift": ["This is a night shift position.", "Day shift and some weekends.", "Overnight availability is required."],
    "check": ["All hires must pass a background check and drug screen.", "Offer contingent on a drug test."],
    "union": [
        "This is a union position covered by a collective bargaining agreement.",
        "Proud member of a labor union family.",
        "Join our credit union team and help members save.",
        "Our union benefits are among the best in the region.",
    ],
    "spanish": ["Bilingual in Spanish preferred.", "Must speak Spanish fluently.", "Spanish classes are not offered."],
    "training": ["Paid training provided.", "On the job training available for new hires.", "No training will be provided."],
    "tools": ["Proficient in Microsoft Excel and SQL.", "Experience with Tableau or Python is helpful."],
    "wage": [
        "Pay: $18.00 - $22.00 per hour.",
        "Salary: $65,000 - $80,000 per year.",
        "Starting wage $16.50 an hour.",
        "Compensation is $4,200 monthly.",
        "We pay $900 per week.",
        "Salary between $90,000 and $110,000 annually.",
    ],
    "filler": [
        "We are an equal opportunity employer.",
        "Apply today to join our growing team!",
        "Our company has served the community for over 30 years.",
        "Come grow your career with us.",
    ],
}

TITLE_AFFINITY = {
    "Data Analyst": ["skill", "tools", "wage"],
    "Senior Data Analyst": ["skill", "tools", "education"],
    "Registered Nurse - $5,000 Sign-On Bonus": ["task", "benefits", "shift", "check"],
    "Seasonal Part-Time Cashier": ["skill", "task", "spanish"],
    "Firefighter": ["task", "union", "training", "check"],
    "Firefighter / EMT": ["task", "union", "training"],
    "Chief Executive Officer": ["education", "wage"],
    "Marketing Intern": ["skill", "training"],
    "Warehouse Supervisor": ["shift", "union", "wage"],
    "Assistant Store Manager": ["skill", "task", "spanish", "wage"],
    "Software Engineer (Remote)": ["tools", "education", "wage"],
    "Customer Service Representative": ["skill", "spanish", "training"],
    "General Manager": ["education", "benefits"],
    "Line Cook": ["shift", "training", "wage"],
    "Director of Nursing": ["task", "education", "benefits", "union"],
}


def corpus(firms):
    ads = []
    months = [f"2022-{m:02d}" for m in range(1, 13)] + [f"2023-{m:02d}" for m in range(1, 7)]
    for i in range(60):
        title = AD_TITLES[i % len(AD_TITLES)]
        kinds = TITLE_AFFINITY[title] + ["filler"]
        body = []
        for k in kinds:
            pool = SENTENCE_POOL[k]
            body.extend(rng.sample(pool, min(len(pool), rng.randrange(1, 3))))
        rng.shuffle(body)
        firm = firms[(i * 13) % len(firms)]
        compiled = rng.randrange(2, len(months))
        acquired = compiled - rng.randrange(0, 3)
        ad = {
            "id": f"ad{i:04d}",
            "title": title,
            "body": " ".join(body),
            "date_compiled": months[compiled],
            "date_acquired": months[acquired],
            "state": firm[3],
            "zip": firm[2],
        }
        # Spelling variants of the establishment name exercise the fuzzy matcher.
        name = firm[1]
        variant = i % 4
        if variant == 1:
            name = name.upper().replace(" INC", ", Inc.")
        elif variant == 2:
            name = name.replace("Corporation", "Corp.").replace("Company", "Co.")
        elif variant == 3:
            name = None
        if name:
            ad["firm_name_meta"] = name
        if i % 10 == 0:
            ad["wage_min_meta"] = 20.0
            ad["wage_max_meta"] = 24.0
        if i % 9 == 0:
            ad.pop("date_acquired")
        ads.append(ad)
    # Ads compiled in an anomalous month fall back to compiled minus two.
    ads[5]["date_compiled"] = "2022-07"
    ads[5]["date_acquired"] = "2022-07"
    ads[17]["date_compiled"] = "2022-09"
    ads[17]["date_acquired"] = "2022-08"
    return ads


def main():
    # Corpus fixtures.
    firms = establishments()
    write_csv("firms/establishments.csv", ["est_id", "name", "zip", "state", "naics", "sic"], firms)
    ads = corpus(firms)
    write_jsonl("corpus/sample.jsonl", ads)
    write_jsonl(
        "corpus/three_rows.jsonl",
        [
            {"id": "r1", "title": "Line Cook", "body": "Prepare meals. Keep the kitchen clean.", "date_compiled": "2023-01-15",
             "date_acquired": "2022-12-01", "state": "OH", "zip": "43004", "firm_name_meta": "Maple Foods LLC"},
            {"id": "r2", "title": "Data Analyst", "body": "Analyze data. Pay: $30 per hour.", "date_compiled": "2023-02",
             "state": "TX", "wage_min_meta": 30.0, "wage_max_meta": 30.0},
            {"id": "r3", "title": "Firefighter", "body": "Participate in firefighting efforts.", "date_compiled": "2023-03"},
        ],
    )
    write(
        "corpus/readability.txt",
        "The quick brown fox jumps over the lazy dog. Employees must demonstrate reliability and "
        "communicate effectively with supervisors. We value teamwork, integrity, and continuous "
        "improvement in everything we do.\n",
    )
    firm_spans = [{"ad_id": a["id"], "firm_name": firms[(int(a["id"][2:]) * 13) % len(firms)][1]}
                  for a in ads if "firm_name_meta" not in a]
    write_jsonl("firms/spans.jsonl", firm_spans)

    # Knowledge-map dictionaries.
    write_csv("dictionaries/benefits.csv", ["term", "label"], [
        ["health insurance", "health_insurance"], ["dental insurance", "dental_insurance"],
        ["paid time off", "paid_time_off"], ["PTO", "paid_time_off"], ["401(k)", "retirement_plan"],
        ["tuition reimbursement", "tuition_assistance"], ["", "blank_row_is_skipped"],
    ])
    write_csv("dictionaries/education.csv", ["term", "label"], [
        ["high school diploma", "high_school"], ["GED", "high_school"], ["bachelor's degree", "bachelors"],
        ["master's degree", "masters"], ["associate degree", "associates"],
    ])
    write_csv("dictionaries/shifts.csv", ["term", "label"], [
        ["night shift", "night"], ["day shift", "day"], ["weekends", "weekend"], ["overnight", "night"],
    ])
    write_csv("dictionaries/background_checks.csv", ["term", "label"], [
        ["background check", "background_check"], ["drug screen", "drug_test"], ["drug test", "drug_test"],
    ])
    write_csv("dictionaries/riasec.csv", ["term", "interest"], [
        ["lift", "R"], ["operate", "Realistic"], ["analyze", "I"], ["data", "Investigative"], ["design", "A"],
        ["customers", "S"], ["patients", "Social"], ["lead", "E"], ["sell", "Enterprising"], ["records", "C"],
        ["schedule", "Conventional"],
    ])
    write_csv("dictionaries/tools_tech.csv", ["Example", "Commodity Code", "Commodity Title"], [
        ["Microsoft Excel", "43232110", "Spreadsheet software"], ["SQL", "43232605", "Analytical or scientific software"],
        ["Tableau", "43232605", "Analytical or scientific software"], ["Python", "43232403", "Development environment software"],
    ])
    write_csv("dictionaries/labor.csv", ["term", "uci", "label"], [
        ["union", "LABOR_UNION", "Labor union"], ["collective bargaining", "LABOR_UNION", "Labor union"],
        ["credit union", "FINANCIAL_INSTITUTION", "Credit union"],
    ])
    write("dictionaries/exclusions.txt", "overnight\n")
    write_jsonl("dictionaries/rules.jsonl", [
        {"rule_id": "union-not-credit", "kind": "NEGATION", "trigger_uci": "LABOR_UNION",
         "guard": {"terms": ["credit"]}, "window": 2},
    ])

    # Sentence filters.
    write("filters/skill_cues.txt", "# stage-1 skill cues\nability to\nexperience with\nknowledge of\nskills\nproficient in\n")
    write("filters/task_cues.txt", "# stage-1 task cues\nyou will\nresponsible for\nduties include\n")

    # Title coding.
    ref = [
        ["13-2099.01", "13-2099", "Data Analyst"], ["15-1243.00", "15-1243", "Data Analyst"],
        ["15-2041.00", "15-2041", "Data Analyst"], ["15-2051.00", "15-2051", "Data Analyst"],
        ["15-2051.01", "15-2051", "Data Analyst"], ["15-2099.01", "15-2099", "Data Analyst"],
        ["19-1029.01", "19-1029", "Data Analyst"], ["19-3022.00", "19-3022", "Data Analyst"],
        ["19-4061.00", "19-4061", "Data Analyst"],
        ["29-1141.00", "29-1141", "Registered Nurse"], ["41-2011.00", "41-2011", "Cashier"],
        ["33-2011.00", "33-2011", "Firefighter"], ["33-2011.00", "33-2011", "Fire Fighter"],
        ["11-1011.00", "11-1011", "Chief Executive Officer"], ["11-1011.00", "11-1011", "CEO"],
        ["11-2021.00", "11-2021", "Marketing Manager"], ["53-1047.00", "53-1047", "Warehouse Supervisor"],
        ["41-1011.00", "41-1011", "Store Manager"], ["15-1252.00", "15-1252", "Software Engineer"],
        ["43-4051.00", "43-4051", "Customer Service Representative"], ["11-1021.00", "11-1021", "General Manager"],
        ["35-2014.00", "35-2014", "Line Cook"], ["11-9111.00", "11-9111", "Director of Nursing"],
    ]
    write_csv("titles/reference_titles.csv", ["onet_code", "soc_code", "title"], ref)
    write_csv("titles/hierarchy_base.csv", ["term", "value", "label"], [
        ["Internship", -10, "Intern level"], ["Intern", -10, "Intern level"], ["Trainee", -10, "Intern level"],
        ["Entry-Level", 0, "Base level"], ["Manager", 10, "First-Level Supervisor"],
        ["Supervisor", 10, "First-Level Supervisor"], ["Team Leader", 10, "First-Level Supervisor"],
        ["Territory Manager", 20, "Second-Level Supervisor"], ["Division Leader", 30, "Third-Level Supervisor"],
        ["General Manager", 30, "Third-Level Supervisor"], ["Director", 40, "First-level Executive"],
        ["CHRO", 50, "Senior Executive"], ["Chief Human Resources Officer", 50, "Senior Executive"],
        ["CEO", 60, "Top Management"], ["Chief Executive Officer", 60, "Top Management"],
    ])
    write_csv("titles/hierarchy_stepper.csv", ["term", "value", "label"], [
        ["Helper", -7, "Helper"], ["Junior", -6, "Junior"], ["Jr", -6, "Junior"], ["Asst", -5, "Assistant"],
        ["Assistant", -5, "Assistant"], ["Associate", -3, "Associate"], ["Vice", -2, "Vice"], ["Deputy", -1, "Deputy"],
        ["Lead", 1, "Lead"], ["Leader", 1, "Leader"], ["Sr", 2, "Senior"], ["Senior", 2, "Senior"],
        ["Exec", 3, "Executive"], ["Executive", 3, "Executive"], ["Chief", 4, "Executive"],
    ])
    write_csv("titles/title_features.csv", ["term", "uci", "label"], [
        ["sign-on bonus", "sign_on_bonus", "Sign-on bonus"], ["sign on bonus", "sign_on_bonus", "Sign-on bonus"],
        ["signing bonus", "sign_on_bonus", "Sign-on bonus"], ["seasonal", "seasonal", "Seasonal"],
        ["part-time", "part_time", "Part time"], ["part time", "part_time", "Part time"],
        ["remote", "remote", "Remote"], ["work from home", "remote", "Remote"], ["temporary", "temporary", "Temporary"],
    ])

    # Wages.
    write_jsonl("wages/grammar_cases.jsonl", wage_cases())
    write_jsonl("wages/overrides.jsonl", [
        {"ad_id": "ad0003", "sentence_idx": 0, "min_span": "$19.00", "max_span": "$21.00", "freq": "hourly"},
    ])

    # Tag classes.
    write("tags/union/keywords.txt", "union\n")
    write("tags/union/negative_rules.txt", "# checked first\ncredit\nnon union\nunion station\n")
    write("tags/union/positive_rules.txt", "collective bargaining\nlabor\nunion position\nunion benefits\nmember\n")
    write("tags/spanish_language/keywords.txt", "spanish\n")
    write("tags/spanish_language/negative_rules.txt", "not offered\nclasses\n")
    write("tags/spanish_language/positive_rules.txt", "bilingual\nspeak\nfluent\nfluently\n")
    write("tags/training/keywords.txt", "training\n")
    write("tags/training/negative_rules.txt", "no training\n")
    write("tags/training/positive_rules.txt", "paid training\non the job training\nprovided\navailable\n")
    write_jsonl("tags/golden.jsonl", [
        {"text": "This is a union position covered by a collective bargaining agreement.", "class": "union", "decision": "positive"},
        {"text": "Proud member of a labor union family.", "class": "union", "decision": "positive"},
        {"text": "Join our credit union team and help members save.", "class": "union", "decision": "negative"},
        {"text": "Our union benefits are among the best in the region.", "class": "union", "decision": "positive"},
        {"text": "Bilingual in Spanish preferred.", "class": "spanish_language", "decision": "positive"},
        {"text": "Must speak Spanish fluently.", "class": "spanish_language", "decision": "positive"},
        {"text": "Spanish classes are not offered.", "class": "spanish_language", "decision": "negative"},
        {"text": "Paid training provided.", "class": "training", "decision": "positive"},
        {"text": "On the job training available for new hires.", "class": "training", "decision": "positive"},
        {"text": "No training will be provided.", "class": "training", "decision": "negative"},
    ])

    # Validation tables: score bins with their frequency share and accuracy rows.
    labels5 = ["0.80-0.84", "0.85", "0.86", "0.87", "0.88", "0.89", "0.90", "0.91-0.95", "0.96-1"]
    t5 = {
        "freq": [0.11, 0.18, 0.21, 0.19, 0.13, 0.09, 0.05, 0.04, 0.00],
        "gemini": [0.59, 0.79, 0.86, 0.93, 0.93, 0.96, 0.97, 0.99, 1.0],
        "gpt": [0.19, 0.26, 0.35, 0.44, 0.57, 0.67, 0.73, 0.90, 0.99],
        "llama": [0.49, 0.65, 0.73, 0.82, 0.87, 0.90, 0.91, 0.96, 1.0],
        "majority": [0.54, 0.39, 0.29, 0.81, 0.86, 0.90, 0.91, 0.96, 1.0],
        "strict": [0.65, 0.41, 0.25, 0.89, 0.90, 0.95, 0.96, 0.99, 1.0],
        "human1": [0.35, 0.55, 0.77, 0.87, 0.92, 0.85, 0.85, 0.99, 1.0],
        "human2": [0.14, 0.60, 0.51, 0.56, 0.56, 0.72, 0.85, 0.84, 1.0],
    }
    cols = list(t5)
    write_csv("validation/table5.csv", ["bin_label"] + cols, [[l] + [t5[c][i] for c in cols] for i, l in enumerate(labels5)])
    labels7 = ["0.81-0.84", "0.85", "0.86", "0.87", "0.88", "0.89", "0.90", "0.91-0.95", "0.96-1"]
    t7 = {
        "freq": [0.00, 0.01, 0.04, 0.10, 0.17, 0.21, 0.18, 0.28, 0.01],
        "gemini": [0.12, 0.21, 0.36, 0.40, 0.52, 0.66, 0.73, 0.90, 1.00],
        "gpt": [0.02, 0.11, 0.15, 0.22, 0.35, 0.38, 0.52, 0.78, 0.99],
        "llama": [0.06, 0.25, 0.33, 0.42, 0.53, 0.64, 0.72, 0.87, 1.00],
        "majority": [0.95, 0.81, 0.73, 0.65, 0.53, 0.40, 0.68, 0.87, 1.0],
        "strict": [0.98, 0.90, 0.83, 0.73, 0.56, 0.42, 0.72, 0.90, 1.0],
    }
    cols = list(t7)
    write_csv("validation/table7.csv", ["bin_label"] + cols, [[l] + [t7[c][i] for c in cols] for i, l in enumerate(labels7)])

    cats = ["skill", "not_skill"]
    rows = []
    for i in range(20):
        ref_label = rng.choice(cats)
        raters = [ref_label if rng.random() < 0.75 else rng.choice(cats) for _ in range(3)]
        rows.append([f"item{i:02d}", ref_label] + raters)
    write_csv("validation/raters.csv", ["item", "system", "rater1", "rater2", "rater3"], rows)

    firefighter = [
        (15611, "Participate in firefighting efforts."),
        (8226, "Drive and operate fire fighting vehicles and equipment."),
        (6619, "Conduct wildland firefighting training."),
        (4017, "Clean and maintain fire stations and fire fighting equipment and apparatus."),
        (2441, "Work with or remove hazardous material."),
        (2164, "Rescue and evacuate injured persons."),
        (2118, "Conduct fire, safety, and sanitation inspections."),
        (1961, "Communicate fire details to superiors, subordinates, or interagency dispatch centers, using two-way radios."),
        (1867, "Develop training materials and conduct training sessions on fire protection."),
        (1529, "Interview and hire applicants."),
        (1473, "Assign duties to other staff and give instructions regarding work methods and routines."),
        (1460, "Operate safety equipment and use safe work habits."),
        (1305, "Direct, and participate in, forest fire suppression."),
        (995, "Maintain knowledge of fire laws and fire prevention techniques and tactics."),
        (905, "Supervise activities of other forestry workers."),
    ]
    write_csv("validation/firefighter_tasks.csv", ["count", "task"], firefighter)

    # Label sets for the embedding fixtures (texts; vectors come from hashed_bow.py).
    write_jsonl("embeddings/skill_members.jsonl",
                [{"id": f"{code}/{j}", "text": t, "label_code": code}
                 for code, ms in SKILL_SETS.items() for j, t in enumerate(ms)])
    write_jsonl("embeddings/task_members.jsonl",
                [{"id": f"{code}/{j}", "text": t, "label_code": code}
                 for code, ms in TASK_SETS.items() for j, t in enumerate(ms)])
    write_jsonl("embeddings/reference_titles.jsonl",
                [{"id": f"{onet}|{normalize_title(t)}", "text": t} for onet, _, t in ref])
    write_jsonl("embeddings/title_queries.jsonl", [{"id": a["id"], "text": a["title"]} for a in ads])
    write_jsonl("embeddings/candidates.jsonl", [{"id": f"cand{j:02d}", "text": t} for j, t in enumerate(CANDIDATES)])


if __name__ == "__main__":
    main()
