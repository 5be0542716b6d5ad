from __future__ import annotations

from pathlib import Path

import pytest

from resner.context_rules import parse_rules
from resner.lexicon import build_lexicon, load_primary_entities
from resner.transform import load_transform_rules

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

PRIMARY_TSV = """\
# term\tclass\tconcept_id\trank
proteína C reactiva\tPROTEINAS\t55235003\t0
hemoglobina\tPROTEINAS\t38082009\t0
antígeno CD13\tPROTEINAS\t127919007\t5
CA 19,9\tPROTEINAS\t21676004\t5
CA\tNORMALIZABLES\t5540006\t10
creatinina\tNORMALIZABLES\t15373003\t10
cromo\tNORMALIZABLES\t22566001\t10
warfarina\tNORMALIZABLES\t372756006\t10
amoxicilina\tNORMALIZABLES\t372687004\t10
ácido clavulánico\tNORMALIZABLES\t372725003\t10
amoxicilina y ácido clavulánico\tNORMALIZABLES\t427483001\t9
cloruro de potasio\tNORMALIZABLES\t387458008\t10
clorhidrato de ciclopentolato\tNORMALIZABLES\t387444003\t10
vitamina\tNORMALIZABLES\t87818001\t20
suero casero\tNO_NORMALIZABLES\t\t30
Isoplasmal G\tUNCLEAR\t\t40
"""

TRANSFORMS_TSV = """\
# id\tmatch\ttemplate\tpriority
salt_reorder\t^(clorhidrato|sulfato|fosfato|acetato) de (.+)$\t\\2 \\1\t10
de_potasio\t^(.+) de potasio$\t\\1 potásico\t20
antigen_cd\t^antígeno (CD)([0-9]+)$\t(?:antígeno )?\\1[- ]?\\2\t30
pair_glue\t^(.+) y (.+)$\t(?:\\1(?: y | ?[+/] ?)\\2|\\2(?: y | ?[+/] ?)\\1)\t40
"""

RULES_TEXT = """\
# contextual rules for ambiguous abbreviations
b:[il::bioquímica|en sangre|hemoglobina|
   hemograma|leucocit|parásito|plaqueta|
   prote.na|recuento|urea] - [PCR] - >
[m=proteína]

[il::aclaramiento|filtrado|renal|urea] - [Cr] - > [m=creatinina]

- [Cr] - > [m=cromo]
"""


@pytest.fixture(scope="session")
def primaries():
    return load_primary_entities(PRIMARY_TSV)


@pytest.fixture(scope="session")
def transforms():
    return load_transform_rules(TRANSFORMS_TSV)


@pytest.fixture(scope="session")
def context_rules():
    return parse_rules(RULES_TEXT)


@pytest.fixture(scope="session")
def lexicon(primaries, transforms, context_rules):
    return build_lexicon(primaries, transforms, foci=[r.focus for r in context_rules])
