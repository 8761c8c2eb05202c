"""Lexicon parsing, grammar construction, word pairs, branching stats."""

import pytest

from voicecmd.errors import (DuplicateWord, EmptyGrammar, EmptyPronunciation,
                             LexiconError, UnknownPhoneme, UnknownWord)
from voicecmd.grammar import (branching_stats, format_grammar, parse_grammar,
                              word_pairs)
from voicecmd.lexicon import Lexicon, format_lexicon, parse_lexicon

LEX = parse_lexicon("""
open: o p e n
file: ph a i l
close: k l o s
undo: u n t o
""")


# --- lexicon ---

def test_parse_entry():
    assert LEX.pronunciation("open") == ("o", "p", "e", "n")
    assert len(LEX) == 4


def test_empty_file_is_valid():
    assert len(parse_lexicon("")) == 0
    assert len(parse_lexicon("# only a comment\n\n")) == 0


def test_unknown_phoneme():
    with pytest.raises(UnknownPhoneme):
        parse_lexicon("open: o zz")


def test_duplicate_word():
    with pytest.raises(DuplicateWord):
        parse_lexicon("a: a\na: o\n")


def test_empty_pronunciation():
    with pytest.raises(EmptyPronunciation):
        parse_lexicon("open:\n")


def test_missing_colon():
    with pytest.raises(LexiconError):
        parse_lexicon("open o p e n\n")


def test_lexicon_round_trip():
    again = parse_lexicon(format_lexicon(LEX))
    assert again.entries == LEX.entries


# --- grammar ---

def test_two_commands_accept_exactly():
    fsn = parse_grammar("open file\nclose file\n", LEX)
    assert fsn.accepts(("open", "file"))
    assert fsn.accepts(("close", "file"))
    assert not fsn.accepts(("open",))
    assert not fsn.accepts(("file", "open"))
    assert not fsn.accepts(("open", "file", "file"))
    assert set(fsn.accepted_sequences()) == {("open", "file"), ("close", "file")}


def test_empty_grammar():
    with pytest.raises(EmptyGrammar):
        parse_grammar("# nothing here\n", LEX)


def test_unknown_word():
    with pytest.raises(UnknownWord):
        parse_grammar("open missing\n", LEX)


def test_prefix_sharing():
    fsn = parse_grammar("open file\nopen undo\n", LEX)
    start_arcs = fsn.out_arcs(0)
    assert len(start_arcs) == 1 and start_arcs[0].word == "open"


def test_prefix_command_of_longer_command():
    fsn = parse_grammar("open\nopen file\n", LEX)
    assert fsn.accepts(("open",))
    assert fsn.accepts(("open", "file"))
    assert not fsn.accepts(("open", "open"))
    assert branching_stats(fsn).num_commands == 2


def test_grammar_round_trip():
    fsn = parse_grammar("open file\nclose file\nundo\nopen undo file\n", LEX)
    again = parse_grammar(format_grammar(fsn), LEX)
    assert set(again.accepted_sequences()) == set(fsn.accepted_sequences())


# --- word pairs ---

def test_word_pairs_shared_suffix():
    fsn = parse_grammar("open file\nclose file\n", LEX)
    pairs = word_pairs(fsn)
    assert pairs.pairs == {("open", "file"), ("close", "file")}
    assert pairs.initial == {"open", "close"}
    assert pairs.final == {"file"}


def test_word_pairs_single_word_command():
    fsn = parse_grammar("undo\n", LEX)
    pairs = word_pairs(fsn)
    assert pairs.pairs == frozenset()
    assert pairs.initial == {"undo"}
    assert pairs.final == {"undo"}


def _brute_force_pairs(fsn):
    pairs = set()
    initial = set()
    final = set()
    for seq in fsn.accepted_sequences():
        initial.add(seq[0])
        final.add(seq[-1])
        pairs.update(zip(seq, seq[1:]))
    return pairs, initial, final


def test_word_pairs_match_enumeration():
    text = "\n".join([
        "open file", "open undo", "close file", "undo",
        "open file close", "close undo file", "file",
    ])
    fsn = parse_grammar(text, LEX)
    got = word_pairs(fsn)
    pairs, initial, final = _brute_force_pairs(fsn)
    assert got.pairs == pairs
    assert got.initial == initial
    assert got.final == final


# --- branching stats ---

def test_branching_two_commands():
    fsn = parse_grammar("open file\nclose file\n", LEX)
    stats = branching_stats(fsn)
    assert stats.num_words == 3
    assert stats.num_commands == 2
    assert len(fsn.out_arcs(0)) == 2


def test_branching_flat_grammar():
    fsn = parse_grammar("open\nclose\nfile\nundo\n", LEX)
    stats = branching_stats(fsn)
    assert stats.num_commands == 4
    assert stats.mean_out_degree == 4.0   # START is the only branching node


def test_branching_matches_path_count():
    text = "\n".join([
        "open", "open file", "open file undo", "close file",
        "close undo", "undo undo undo", "file open",
    ])
    fsn = parse_grammar(text, LEX)
    assert branching_stats(fsn).num_commands == len(set(fsn.accepted_sequences()))
