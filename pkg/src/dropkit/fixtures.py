"""Worked DROP examples used as executable fixtures.

Each record is one short passage snippet with a single question, its gold
answer and the answer a baseline system gave for it.
"""

from __future__ import annotations

from pathlib import Path

from .corpus import Answer, Passage, QuestionAnswer, dump_dataset, dump_predictions
from .tables import PredArgTable, dump_tables, pattern_extract

__all__ = ["FIXTURES", "fixture_dataset", "fixture_predictions", "fixture_tables", "write_fixtures"]

# (question_id, passage, question, gold, baseline prediction)
FIXTURES: list[tuple[str, str, str, Answer, Answer]] = [
    (
        "t1-sub",
        "That year, his Untitled (1981), a painting of a haloed, black-headed man with a bright red "
        "skeletal body, depicted amid the artists signature scrawls, was sold by Robert Lehrman for "
        "$16.3 million, well above its $12 million high estimate.",
        "How many more dollars was the Untitled (1981) painting sold for than the 12 million dollar estimation?",
        Answer.of_number("4300000"),
        Answer.of_spans("$16.3 million"),
    ),
    (
        "t1-comp",
        "In 1517, the seventeen-year-old King sailed to Castile. There, his Flemish court ... "
        "In May 1518, Charles traveled to Barcelona in Aragon.",
        "Where did Charles travel to first, Castile or Barcelona?",
        Answer.of_spans("Castile"),
        Answer.of_spans("Aragon"),
    ),
    (
        "t1-sel",
        "In 1970, to commemorate the 100th anniversary of the founding of Baldwin City, Baker University "
        "professor and playwright Don Mueller and Phyllis E. Braun, Business Manager, produced a musical "
        "play entitled The Ballad Of Black Jack to tell the story of the events that led up to the battle.",
        "Who was the University professor that helped produce The Ballad Of Black Jack, Ivan Boyd or Don Mueller?",
        Answer.of_spans("Don Mueller"),
        Answer.of_spans("Baker"),
    ),
    (
        "t1-add",
        "Before the UNPROFOR fully deployed, the HV clashed with an armed force of the RSK in the village "
        "of Nos Kalik, located in a pink zone near Šibenik, and captured the village at 4:45 p.m. on "
        "2 March 1992. The JNA formed a battlegroup to counterattack the next day.",
        "What date did the JNA form a battlegroup to counterattack after the village of Nos Kalik was captured?",
        Answer.of_date(3, 3, 1992),
        Answer.of_spans("2 March 1992"),
    ),
    (
        "t1-count",
        "Denver would retake the lead with kicker Matt Prater nailing a 43-yard field goal, yet Carolina "
        "answered as kicker John Kasay ties the game with a 39-yard field goal. ... Carolina closed out "
        "the half with Kasay nailing a 44-yard field goal. ... In the fourth quarter, Carolina sealed the "
        "win with Kasay's 42-yard field goal.",
        "Which kicker kicked the most field goals?",
        Answer.of_spans("John Kasay"),
        Answer.of_spans("Matt Prater"),
    ),
    (
        "t1-coref",
        "James Douglas was the second son of Sir George Douglas of Pittendreich, and Elizabeth Douglas, "
        "daughter David Douglas of Pittendreich. Before 1543 he married Elizabeth, daughter of James "
        "Douglas, 3rd Earl of Morton. In 1553 James Douglas succeeded to the title and estates of his "
        "father-in-law.",
        "How many years after he married Elizabeth did James Douglas succeed to the title and estates of his father-in-law?",
        Answer.of_number("10"),
        Answer.of_spans("1553"),
    ),
    (
        "t1-arith",
        "Although the movement initially gathered some 60,000 adherents, the subsequent establishment of "
        "the Bulgarian Exarchate reduced their number by some 75%.",
        "How many adherents were left after the establishment of the Bulgarian Exarchate?",
        Answer.of_number("15000"),
        Answer.of_spans("60,000"),
    ),
    (
        "t1-spans",
        "According to some sources 363 civilians were killed in Kavadarci, 230 in Negotino and 40 in Vatasha.",
        "What were the 3 villages that people were killed in?",
        Answer.of_spans("Kavadarci", "Negotino", "Vatasha"),
        Answer.of_spans("Negotino and 40 in Vatasha"),
    ),
    (
        "t1-other",
        "This Annual Financial Report is our principal financial statement of accountability. The AFR "
        "gives a comprehensive view of the Department's financial activities ...",
        "What does AFR stand for?",
        Answer.of_spans("Annual Financial Report"),
        Answer.of_spans("one of the Big Four audit firms"),
    ),
    (
        "t4-subcoref",
        "... Twenty-five of his 150 men were sick, and his advance stalled ...",
        "How many of Bartolomé de Amésqueta's 150 men were not sick?",
        Answer.of_number("125"),
        Answer.of_number("145"),
    ),
    (
        "t4-countfilter",
        "... Macedonians were the largest ethnic group in Skopje, with 338,358 inhabitants ... Then came "
        "... Serbs (14,298 inhabitants), Turks (8,595), Bosniaks (7,585) and Vlachs (2,557) ...",
        "How many ethnicities had less than 10000 people?",
        Answer.of_number("3"),
        Answer.of_number("2"),
    ),
    (
        "t4-domain",
        "... Smith was sidelined by a torn pectoral muscle suffered during practice ...",
        "How many quarters did Smith play?",
        Answer.of_number("0"),
        Answer.of_number("2"),
    ),
    (
        "t4-add",
        "... culminating in the Battle of Vienna of 1683, which marked the start of the 15-year-long "
        "Great Turkish War ...",
        "What year did the Great Turkish War end?",
        Answer.of_number("1698"),
        Answer.of_number("1668"),
    ),
]


def passage_id(question_id: str) -> str:
    return f"p-{question_id}"


def fixture_dataset(*, word_numbers: bool = False) -> list[tuple[Passage, list[QuestionAnswer]]]:
    return [
        (
            Passage.from_text(passage_id(qid), text, word_numbers=word_numbers),
            [QuestionAnswer.build(qid, question, [gold])],
        )
        for qid, text, question, gold, _ in FIXTURES
    ]


def fixture_predictions() -> dict[str, Answer]:
    return {qid: pred for qid, _, _, _, pred in FIXTURES}


def fixture_tables() -> dict[str, PredArgTable]:
    """Pattern-extracted tables; passages that yield no rows are left out."""
    tables = {}
    for passage, _ in fixture_dataset():
        table = pattern_extract(passage)
        if table.rows:
            tables[passage.id] = table
    return tables


def write_fixtures(out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "dataset.json": dump_dataset(fixture_dataset()),
        "tables.json": dump_tables(fixture_tables()),
        "predictions.json": dump_predictions(fixture_predictions()),
    }
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
