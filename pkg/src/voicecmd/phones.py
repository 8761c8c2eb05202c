"""Phoneme inventory: 39 romanized Korean phoneme labels plus silence.

Words are modeled as chains of these units; the inventory is fixed and
lexicon entries may only reference it.
"""

CONSONANTS = (
    "k", "kk", "kh", "n", "t", "tt", "th", "l", "m",
    "p", "pp", "ph", "s", "ss", "c", "cc", "ch", "h", "ng",
)

VOWELS = (
    "a", "ay", "ya", "e", "ey", "ye", "yey", "o", "wa", "way",
    "oy", "yo", "wu", "we", "wey", "wi", "yu", "u", "uy", "i",
)

PHONEMES = CONSONANTS + VOWELS

SIL = "SIL"

ALL_LABELS = PHONEMES + (SIL,)

assert len(PHONEMES) == 39
