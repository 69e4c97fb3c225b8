"""Writes the 13-participant ELAN fixture set used by the annotation tests.

22 INTS_start and 19 INTS_continue intervals in total; 7 participants carry at
least one "audible smack/tongue click" cue.
"""
import pathlib
import random

START = [2, 2, 2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1]
CONTINUE = [1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1, 2, 1]
SMACK = {1, 2, 3, 4, 5, 6, 7}
OTHER_CUES = ["posture change", "filler", "first word of utterance", "audible deep breath"]


def main():
    out = pathlib.Path(__file__).with_name("eaf")
    out.mkdir(exist_ok=True)
    rng = random.Random(7)
    for p in range(1, 14):
        pid = f"P{p:02d}"
        tiers = {"INTS_start": [], "INTS_continue": [], "cues": []}
        t = 3_600_000
        for tier, n in (("INTS_start", START[p - 1]), ("INTS_continue", CONTINUE[p - 1])):
            for _ in range(n):
                t += rng.randrange(20_000, 40_000)
                dur = rng.randrange(800, 3_000)
                tiers[tier].append((t, t + dur, ""))
                cue = "audible smack/tongue click" if p in SMACK and not tiers["cues"] else rng.choice(OTHER_CUES)
                tiers["cues"].append((t + dur - 400, t + dur, cue))
                t += dur
        slots = []
        body = []
        aid = 0
        for tier, items in tiers.items():
            body.append(f'  <TIER LINGUISTIC_TYPE_REF="default-lt" PARTICIPANT="{pid}" TIER_ID="{tier}">')
            for start, end, value in items:
                s1, s2 = len(slots) + 1, len(slots) + 2
                slots += [(s1, start), (s2, end)]
                aid += 1
                body += [
                    "    <ANNOTATION>",
                    f'      <ALIGNABLE_ANNOTATION ANNOTATION_ID="a{aid}" TIME_SLOT_REF1="ts{s1}" TIME_SLOT_REF2="ts{s2}">',
                    f"        <ANNOTATION_VALUE>{value}</ANNOTATION_VALUE>",
                    "      </ALIGNABLE_ANNOTATION>",
                    "    </ANNOTATION>",
                ]
            body.append("  </TIER>")
        lines = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            '<ANNOTATION_DOCUMENT AUTHOR="" DATE="2020-01-01T00:00:00+01:00" FORMAT="3.0" VERSION="3.0">',
            '  <HEADER MEDIA_FILE="" TIME_UNITS="milliseconds">',
            f'    <MEDIA_DESCRIPTOR MEDIA_URL="file:///{pid}.wav" MIME_TYPE="audio/x-wav"/>',
            "  </HEADER>",
            "  <TIME_ORDER>",
        ]
        lines += [f'    <TIME_SLOT TIME_SLOT_ID="ts{i}" TIME_VALUE="{v}"/>' for i, v in slots]
        lines.append("  </TIME_ORDER>")
        lines += body
        lines += [
            '  <LINGUISTIC_TYPE GRAPHIC_REFERENCES="false" LINGUISTIC_TYPE_ID="default-lt" TIME_ALIGNABLE="true"/>',
            "</ANNOTATION_DOCUMENT>",
        ]
        (out / f"{pid}.eaf").write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
