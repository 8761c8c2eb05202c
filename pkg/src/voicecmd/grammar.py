"""Finite-state command grammar and derived word-pair constraints.

The grammar file lists one command (a word sequence) per line. Commands
are compiled into a prefix-shared tree from START merging into END, so
the network accepts exactly the declared command set. Word-pair
constraints are hard allowed/forbidden sets read off the network.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyGrammar, UnknownWord
from .lexicon import Lexicon

START = 0
END = 1


@dataclass(frozen=True)
class Arc:
    src: int
    dst: int
    word: str


@dataclass(eq=False)
class CommandFsn:
    num_nodes: int
    arcs: tuple
    commands: tuple                      # accepted word sequences, in order

    def accepts(self, words) -> bool:
        return tuple(words) in self._command_set

    def __post_init__(self):
        self._command_set = set(self.commands)
        out: dict[int, list[Arc]] = {}
        for arc in self.arcs:
            out.setdefault(arc.src, []).append(arc)
        self._out = out

    def out_arcs(self, node: int) -> list:
        return self._out.get(node, [])

    def accepted_sequences(self) -> tuple:
        return self.commands

    @property
    def words(self) -> tuple:
        seen = {}
        for arc in self.arcs:
            seen.setdefault(arc.word, None)
        return tuple(seen)


@dataclass(frozen=True)
class WordPairSet:
    pairs: frozenset                     # ordered (w1, w2) adjacencies
    initial: frozenset                   # sentence-initial words
    final: frozenset                     # sentence-final words


@dataclass(frozen=True)
class BranchingStats:
    num_words: int
    num_commands: int
    mean_out_degree: float


def parse_grammar(text: str, lexicon: Lexicon) -> CommandFsn:
    """Build the prefix-shared command network from one command per line."""
    commands: list[tuple[str, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = tuple(line.split())
        for word in words:
            if word not in lexicon:
                raise UnknownWord(
                    f"line {lineno}: {word!r} is not in the lexicon")
        if words not in commands:
            commands.append(words)
    if not commands:
        raise EmptyGrammar("grammar declares no commands")

    next_node = 2
    trie: dict[tuple[int, str], int] = {}
    arcs: list[Arc] = []
    arc_seen: set[tuple[int, int, str]] = set()

    def add_arc(src: int, dst: int, word: str) -> None:
        key = (src, dst, word)
        if key not in arc_seen:
            arc_seen.add(key)
            arcs.append(Arc(src, dst, word))

    for words in commands:
        node = START
        for word in words[:-1]:
            child = trie.get((node, word))
            if child is None:
                child = next_node
                next_node += 1
                trie[(node, word)] = child
                add_arc(node, child, word)
            node = child
        add_arc(node, END, words[-1])

    return CommandFsn(num_nodes=next_node, arcs=tuple(arcs),
                      commands=tuple(commands))


def format_grammar(fsn: CommandFsn) -> str:
    return "".join(" ".join(words) + "\n" for words in fsn.commands)


def load_grammar(path, lexicon: Lexicon) -> CommandFsn:
    with open(path, encoding="utf-8") as fobj:
        return parse_grammar(fobj.read(), lexicon)


def save_grammar(fsn: CommandFsn, path) -> None:
    with open(path, "w", encoding="utf-8") as fobj:
        fobj.write(format_grammar(fsn))


def word_pairs(fsn: CommandFsn) -> WordPairSet:
    """Exact adjacent-pair constraints over all accepted sequences."""
    pairs = set()
    for arc in fsn.arcs:
        if arc.dst == END:
            continue
        for succ in fsn.out_arcs(arc.dst):
            pairs.add((arc.word, succ.word))
    initial = {arc.word for arc in fsn.out_arcs(START)}
    final = {arc.word for arc in fsn.arcs if arc.dst == END}
    return WordPairSet(pairs=frozenset(pairs), initial=frozenset(initial),
                       final=frozenset(final))


def branching_stats(fsn: CommandFsn) -> BranchingStats:
    """Vocabulary size, accepted-sequence count, and mean word out-degree
    (over nodes with at least one outgoing arc)."""
    paths: dict[int, int] = {END: 1}

    def count_paths(node: int) -> int:
        if node not in paths:
            paths[node] = sum(count_paths(a.dst) for a in fsn.out_arcs(node))
        return paths[node]

    num_commands = count_paths(START)
    degrees = [len(fsn.out_arcs(n)) for n in range(fsn.num_nodes)
               if fsn.out_arcs(n)]
    mean_deg = sum(degrees) / len(degrees) if degrees else 0.0
    return BranchingStats(num_words=len(fsn.words),
                          num_commands=num_commands,
                          mean_out_degree=mean_deg)
