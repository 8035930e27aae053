"""Stemmer checks against hand-derived full-pipeline outputs."""

import pytest

from lexcourt import porter

# Classic vocabulary pairs, worked through all steps by hand.
FULL_PIPELINE = [
    ("caresses", "caress"),
    ("ponies", "poni"),
    ("ties", "ti"),
    ("caress", "caress"),
    ("cats", "cat"),
    ("feed", "feed"),
    ("agreed", "agre"),
    ("plastered", "plaster"),
    ("bled", "bled"),
    ("motoring", "motor"),
    ("sing", "sing"),
    ("conflated", "conflat"),
    ("troubled", "troubl"),
    ("sized", "size"),
    ("hopping", "hop"),
    ("tanned", "tan"),
    ("falling", "fall"),
    ("hissing", "hiss"),
    ("failing", "fail"),
    ("filing", "file"),
    ("happy", "happi"),
    ("sky", "sky"),
    ("rational", "ration"),
    ("generalizations", "gener"),
    ("oscillators", "oscil"),
    ("dependent", "depend"),
    ("replacement", "replac"),
    ("adjustable", "adjust"),
    ("defensible", "defens"),
    ("irritant", "irrit"),
    ("adoption", "adopt"),
    ("communism", "commun"),
    ("activate", "activ"),
    ("homologous", "homolog"),
    ("effective", "effect"),
    ("roll", "roll"),
    ("controlling", "control"),
    ("probate", "probat"),
    ("rate", "rate"),
    ("cease", "ceas"),
    ("respondents", "respond"),
    ("immigration", "immigr"),
    ("sensibiliti", "sensibl"),
    ("triplicate", "triplic"),
]


@pytest.mark.parametrize("word,expected", FULL_PIPELINE)
def test_stem(word, expected):
    assert porter.stem(word) == expected


def test_short_words_unchanged():
    for word in ("a", "is", "by", "s"):
        assert porter.stem(word) == word


def test_measure():
    assert porter._measure("tr") == 0
    assert porter._measure("ee") == 0
    assert porter._measure("tree") == 0
    assert porter._measure("trouble") == 1
    assert porter._measure("oats") == 1
    assert porter._measure("private") == 2
    assert porter._measure("orrery") == 2


def test_y_is_contextual():
    # y after a consonant acts as a vowel, at word start as a consonant
    assert not porter._is_consonant("sky", 2)
    assert not porter._is_consonant("gyroscope", 1)
    assert porter._is_consonant("yes", 0)
    assert porter._is_consonant("toy", 2)


def test_longest_match_blocks_shorter_rules():
    # "rational" matches "ational" whose condition fails; "tional" must not
    # be retried within the same step
    assert porter._apply_rules("rational", porter._STEP2_RULES, 1) == "rational"
    assert porter._apply_rules("conditional", porter._STEP2_RULES, 1) == "condition"
