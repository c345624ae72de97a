"""Exact models of finitely generated groups and group pairs.

Every element is stored as a normal-form word: a tuple of ``(symbol, exponent)``
syllables.  Normal forms are canonical per model, so element equality is
tuple equality.  Supported kinds are free abelian groups, free groups,
finite cyclic groups and free products of these; all have a word problem and
word metric computable directly from the normal form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, InputError, ResourceError, default_limits

Syllable = tuple[str, int]
Letter = tuple[str, int]  # (symbol, +1 or -1)

_AUTO_SYMBOLS = "abcdfghijklmnopqrstuvwxyz"
_TOKEN = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*?)(?:\^(-?\d+))?$")


@dataclass(frozen=True)
class GroupElement:
    word: tuple[Syllable, ...] = ()

    def __str__(self) -> str:
        if not self.word:
            return "e"
        return " ".join(s if k == 1 else f"{s}^{k}" for s, k in self.word)

    def __repr__(self) -> str:
        return f"GroupElement({str(self)!r})"

    @property
    def is_identity(self) -> bool:
        return not self.word


IDENTITY = GroupElement()


@dataclass(frozen=True)
class GeneratorAlphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.symbols)) != len(self.symbols):
            raise ConfigurationError(f"duplicate generator symbols in {self.symbols}")
        for s in self.symbols:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", s) or s == "e":
                raise ConfigurationError(f"invalid generator symbol {s!r}")

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise InputError(f"symbol {symbol!r} is not in the alphabet {list(self.symbols)}") from None

    def letters(self) -> list[Letter]:
        """Generators and their formal inverses in the fixed order a, a^-1, b, b^-1, ..."""
        return [(s, sign) for s in self.symbols for sign in (1, -1)]


def parse_word(text: str) -> list[Syllable]:
    """Parse ``"t a^2 t^-1"`` (separators: whitespace, ``*`` or ``.``) into raw syllables."""
    text = text.strip()
    if text in ("", "e", "1"):
        return []
    out = []
    for token in re.split(r"[\s*.]+", text):
        if not token:
            continue
        m = _TOKEN.match(token)
        if m is None:
            raise InputError(f"cannot parse word token {token!r}")
        out.append((m.group(1), int(m.group(2)) if m.group(2) is not None else 1))
    return out


class GroupModel:
    """Common interface; subclasses implement the normal form and length."""

    kind: str = ""

    def __init__(self, symbols: Sequence[str]):
        self.alphabet = GeneratorAlphabet(tuple(symbols))
        self._letter_rank = {
            letter: i for i, letter in enumerate(self.alphabet.letters())
        }

    # -- to be provided by subclasses ------------------------------------
    def _reduce(self, syllables: Sequence[Syllable]) -> tuple[Syllable, ...]:
        raise NotImplementedError

    def length(self, g: GroupElement) -> int:
        raise NotImplementedError

    def spell(self, g: GroupElement) -> tuple[Letter, ...]:
        """Shortlex-least geodesic spelling of ``g`` as signed letters."""
        raise NotImplementedError

    def coset_key(self, g: GroupElement, symbols: frozenset[str]) -> GroupElement:
        """Shortest element of the left coset g<symbols>."""
        raise NotImplementedError

    def describe(self) -> dict:
        raise NotImplementedError

    def _check_subalphabet(self, symbols: frozenset[str]) -> None:
        pass

    # -- shared machinery ------------------------------------------------
    @property
    def symbols(self) -> tuple[str, ...]:
        return self.alphabet.symbols

    @property
    def identity(self) -> GroupElement:
        return IDENTITY

    def __eq__(self, other):
        return isinstance(other, GroupModel) and self.describe() == other.describe()

    def __hash__(self):
        return hash(repr(self.describe()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.describe()})"

    def normal_form(self, raw) -> GroupElement:
        """Canonical form of a raw word (string, syllable list or element)."""
        if isinstance(raw, GroupElement):
            syllables = list(raw.word)
        elif isinstance(raw, str):
            syllables = parse_word(raw)
        else:
            syllables = [(s, int(k)) for s, k in raw]
        for s, _ in syllables:
            if s not in self._symbol_set:
                raise InputError(f"symbol {s!r} is not in the alphabet {list(self.symbols)}")
        return GroupElement(self._reduce(syllables))

    @property
    def _symbol_set(self) -> frozenset[str]:
        return frozenset(self.symbols)

    def element(self, raw) -> GroupElement:
        return self.normal_form(raw)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        return GroupElement(self._reduce(g.word + h.word))

    def invert(self, g: GroupElement) -> GroupElement:
        return GroupElement(self._reduce([(s, -k) for s, k in reversed(g.word)]))

    def power(self, g: GroupElement, n: int) -> GroupElement:
        base = g if n >= 0 else self.invert(g)
        return GroupElement(self._reduce(list(base.word) * abs(n)))

    def distance(self, g: GroupElement, h: GroupElement) -> int:
        return self.length(self.multiply(self.invert(g), h))

    def generators(self, symbols: Iterable[str] | None = None) -> list[GroupElement]:
        """Generators and inverses in alphabet order, duplicates (order-2 letters) dropped."""
        allowed = self._symbol_set if symbols is None else frozenset(symbols)
        seen, out = set(), []
        for s, sign in self.alphabet.letters():
            if s not in allowed:
                continue
            g = GroupElement(self._reduce([(s, sign)]))
            if g not in seen and not g.is_identity:
                seen.add(g)
                out.append(g)
        return out

    def shortlex_key(self, g: GroupElement) -> tuple[int, tuple[int, ...]]:
        letters = self.spell(g)
        return len(letters), tuple(self._letter_rank[x] for x in letters)

    def contains(self, g: GroupElement, symbols: Iterable[str]) -> bool:
        """Membership in the subgroup generated by a sub-alphabet."""
        allowed = frozenset(symbols)
        return all(s in allowed for s, _ in g.word)

    def ball(
        self,
        center: GroupElement,
        radius: int,
        symbols: Iterable[str] | None = None,
        max_radius: int | None = None,
    ) -> list[GroupElement]:
        """Elements within ``radius`` of ``center``, in shortlex order of center^-1 g.

        With ``symbols`` the ball is taken in the subgroup generated by that
        sub-alphabet (its own word metric), translated to ``center``.
        """
        limits = default_limits()
        cap = limits.max_radius if max_radius is None else max_radius
        if radius < 0:
            raise InputError("radius must be nonnegative")
        sub = self if symbols is None else self.sub_model(tuple(s for s in self.symbols if s in set(symbols)))
        if sub.polynomial_growth:
            # polynomial growth: guard the size, not the radius
            if sub.ball_size_bound(radius) > limits.max_vertices:
                raise ResourceError(
                    f"ball of radius {radius} would exceed the vertex cap {limits.max_vertices}"
                )
        elif radius > cap:
            raise ResourceError(f"ball radius {radius} exceeds the safety cap {cap}")
        gens = self.generators(symbols)
        found = {IDENTITY}
        frontier = [IDENTITY]
        for _ in range(radius):
            nxt = []
            for g in frontier:
                for s in gens:
                    h = self.multiply(g, s)
                    if h not in found:
                        found.add(h)
                        nxt.append(h)
            frontier = nxt
        rel = sorted(found, key=self.shortlex_key)
        if center.is_identity:
            return rel
        return [self.multiply(center, g) for g in rel]

    def sub_model(self, symbols: Sequence[str]) -> "GroupModel":
        """The built-in model induced on a sub-alphabet (same symbols, same metric)."""
        raise NotImplementedError

    polynomial_growth = False

    def ball_size_bound(self, radius: int) -> int:
        return (2 * radius + 1) ** len(self.symbols)


class FreeAbelian(GroupModel):
    kind = "free_abelian"
    polynomial_growth = True

    def __init__(self, rank: int, symbols: Sequence[str] | None = None):
        if not isinstance(rank, int) or rank < 1:
            raise ConfigurationError(f"free abelian rank must be >= 1, got {rank!r}")
        symbols = _auto_symbols(rank) if symbols is None else list(symbols)
        if len(symbols) != rank:
            raise ConfigurationError(f"free abelian group of rank {rank} needs {rank} symbols, got {symbols}")
        super().__init__(symbols)
        self.rank = rank
        self._pos = {s: i for i, s in enumerate(self.symbols)}

    def describe(self) -> dict:
        return {"kind": self.kind, "rank": self.rank, "symbols": list(self.symbols)}

    def exponents(self, g: GroupElement) -> tuple[int, ...]:
        vec = [0] * self.rank
        for s, k in g.word:
            vec[self._pos[s]] += k
        return tuple(vec)

    def from_exponents(self, vec: Sequence[int]) -> GroupElement:
        return GroupElement(tuple((s, int(k)) for s, k in zip(self.symbols, vec) if k != 0))

    def coords(self, elements: Sequence[GroupElement]) -> np.ndarray:
        return np.array([self.exponents(g) for g in elements], dtype=np.int64).reshape(len(elements), self.rank)

    def _reduce(self, syllables):
        vec = [0] * self.rank
        for s, k in syllables:
            vec[self._pos[s]] += k
        return tuple((s, k) for s, k in zip(self.symbols, vec) if k != 0)

    def length(self, g):
        return sum(abs(k) for _, k in g.word)

    def spell(self, g):
        return tuple((s, 1 if k > 0 else -1) for s, k in g.word for _ in range(abs(k)))

    def coset_key(self, g, symbols):
        return GroupElement(tuple((s, k) for s, k in g.word if s not in symbols))

    def sub_model(self, symbols):
        return FreeAbelian(len(symbols), [s for s in self.symbols if s in set(symbols)])


class Free(GroupModel):
    kind = "free"

    def __init__(self, rank: int, symbols: Sequence[str] | None = None):
        if not isinstance(rank, int) or rank < 1:
            raise ConfigurationError(f"free group rank must be >= 1, got {rank!r}")
        symbols = _auto_symbols(rank) if symbols is None else list(symbols)
        if len(symbols) != rank:
            raise ConfigurationError(f"free group of rank {rank} needs {rank} symbols, got {symbols}")
        super().__init__(symbols)
        self.rank = rank
        self.polynomial_growth = rank == 1

    def describe(self) -> dict:
        return {"kind": self.kind, "rank": self.rank, "symbols": list(self.symbols)}

    def _reduce(self, syllables):
        stack: list[list] = []
        for s, k in syllables:
            if k == 0:
                continue
            if stack and stack[-1][0] == s:
                stack[-1][1] += k
                if stack[-1][1] == 0:
                    stack.pop()
            else:
                stack.append([s, k])
        return tuple((s, k) for s, k in stack)

    def length(self, g):
        return sum(abs(k) for _, k in g.word)

    def spell(self, g):
        return tuple((s, 1 if k > 0 else -1) for s, k in g.word for _ in range(abs(k)))

    def coset_key(self, g, symbols):
        word = list(g.word)
        while word and word[-1][0] in symbols:
            word.pop()
        return GroupElement(tuple(word))

    def sub_model(self, symbols):
        return Free(len(symbols), [s for s in self.symbols if s in set(symbols)])


class FiniteCyclic(GroupModel):
    kind = "finite_cyclic"
    polynomial_growth = True

    def ball_size_bound(self, radius: int) -> int:
        return min(self.order, 2 * radius + 1)

    def __init__(self, order: int, symbols: Sequence[str] | None = None):
        if not isinstance(order, int) or order < 2:
            raise ConfigurationError(f"finite cyclic order must be >= 2, got {order!r}")
        symbols = _auto_symbols(1) if symbols is None else list(symbols)
        if len(symbols) != 1:
            raise ConfigurationError(f"a cyclic group has exactly one generator symbol, got {symbols}")
        super().__init__(symbols)
        self.order = order

    def describe(self) -> dict:
        return {"kind": self.kind, "order": self.order, "symbols": list(self.symbols)}

    def _reduce(self, syllables):
        k = sum(k for _, k in syllables) % self.order
        return ((self.symbols[0], k),) if k else ()

    def length(self, g):
        if not g.word:
            return 0
        k = g.word[0][1]
        return min(k, self.order - k)

    def spell(self, g):
        if not g.word:
            return ()
        s, k = g.word[0]
        if k <= self.order - k:
            return ((s, 1),) * k
        return ((s, -1),) * (self.order - k)

    def coset_key(self, g, symbols):
        return IDENTITY if self.symbols[0] in symbols else g

    def sub_model(self, symbols):
        if tuple(symbols) != self.symbols:
            raise ConfigurationError("the only sub-alphabet of a cyclic group is its generator")
        return self


class FreeProduct(GroupModel):
    kind = "free_product"

    def __init__(self, factors: Sequence[GroupModel]):
        if len(factors) < 2:
            raise ConfigurationError("a free product needs at least two factors")
        for f in factors:
            if isinstance(f, FreeProduct):
                raise ConfigurationError("nested free products are not supported; flatten the factor list")
        symbols = [s for f in factors for s in f.symbols]
        super().__init__(symbols)
        self.factors = tuple(factors)
        self._factor_of = {s: i for i, f in enumerate(factors) for s in f.symbols}

    def describe(self) -> dict:
        return {"kind": self.kind, "factors": [f.describe() for f in self.factors]}

    def factor_index(self, symbol: str) -> int:
        return self._factor_of[symbol]

    def blocks(self, g: GroupElement) -> list[tuple[int, GroupElement]]:
        """Split a normal form into its alternating factor syllables."""
        out: list[tuple[int, list]] = []
        for s, k in g.word:
            i = self._factor_of[s]
            if out and out[-1][0] == i:
                out[-1][1].append((s, k))
            else:
                out.append((i, [(s, k)]))
        return [(i, GroupElement(tuple(w))) for i, w in out]

    def _reduce(self, syllables):
        stack: list[tuple[int, GroupElement]] = []
        for s, k in syllables:
            i = self._factor_of[s]
            block = self.factors[i].normal_form([(s, k)])
            if block.is_identity:
                continue
            if stack and stack[-1][0] == i:
                merged = self.factors[i].multiply(stack[-1][1], block)
                if merged.is_identity:
                    stack.pop()
                else:
                    stack[-1] = (i, merged)
            else:
                stack.append((i, block))
        return tuple(syl for _, b in stack for syl in b.word)

    def length(self, g):
        return sum(self.factors[i].length(b) for i, b in self.blocks(g))

    def spell(self, g):
        return tuple(x for i, b in self.blocks(g) for x in self.factors[i].spell(b))

    def coset_key(self, g, symbols):
        blocks = self.blocks(g)
        if blocks:
            i, last = blocks[-1]
            if any(s in symbols for s in self.factors[i].symbols):
                reduced = self.factors[i].coset_key(last, symbols)
                blocks = blocks[:-1] + ([(i, reduced)] if not reduced.is_identity else [])
        return GroupElement(tuple(syl for _, b in blocks for syl in b.word))

    def _check_subalphabet(self, symbols):
        owners = {self._factor_of[s] for s in symbols}
        if len(owners) != 1:
            raise ConfigurationError(
                f"peripheral sub-alphabet {sorted(symbols)} must lie inside a single free factor"
            )

    def sub_model(self, symbols):
        self._check_subalphabet(frozenset(symbols))
        return self.factors[self._factor_of[symbols[0]]].sub_model(symbols)


def _auto_symbols(n: int) -> list[str]:
    if n > len(_AUTO_SYMBOLS):
        return [f"x{i}" for i in range(n)]
    return list(_AUTO_SYMBOLS[:n])


def make_group(spec) -> GroupModel:
    """Build a model from a descriptor dict (or return an existing model).

    Descriptors: ``{"kind": "free_abelian"|"free", "rank": n, "symbols": [...]}``,
    ``{"kind": "finite_cyclic", "order": m, "symbols": [s]}``,
    ``{"kind": "free_product", "factors": [descriptor, ...]}``.
    When symbols are omitted in a free product they are assigned a, b, c, ...
    across the factors in order.
    """
    if isinstance(spec, GroupModel):
        return spec
    if not isinstance(spec, dict):
        raise ConfigurationError(f"group descriptor must be a mapping, got {type(spec).__name__}")
    return _make(spec, iter(_AUTO_SYMBOLS))


def _take(pool, n):
    try:
        return [next(pool) for _ in range(n)]
    except StopIteration:
        raise ConfigurationError("ran out of automatic generator symbols; give symbols explicitly") from None


def _make(spec: dict, pool) -> GroupModel:
    kind = spec.get("kind")
    allowed = {
        "free_abelian": {"kind", "rank", "symbols"},
        "free": {"kind", "rank", "symbols"},
        "finite_cyclic": {"kind", "order", "symbols"},
        "free_product": {"kind", "factors"},
    }
    if kind not in allowed:
        raise ConfigurationError(f"unknown group kind {kind!r}; expected one of {sorted(allowed)}")
    extra = set(spec) - allowed[kind]
    if extra:
        raise ConfigurationError(f"unexpected fields {sorted(extra)} in {kind} descriptor")
    if kind == "free_product":
        factors = spec.get("factors")
        if not isinstance(factors, list) or len(factors) < 2:
            raise ConfigurationError("free_product needs a list of at least two factors")
        return FreeProduct([_make(f, pool) for f in factors])
    if kind == "finite_cyclic":
        order = spec.get("order")
        if not isinstance(order, int) or order < 2:
            raise ConfigurationError(f"finite_cyclic order must be an integer >= 2, got {order!r}")
        return FiniteCyclic(order, spec.get("symbols") or _take(pool, 1))
    rank = spec.get("rank")
    if not isinstance(rank, int) or rank < 1:
        raise ConfigurationError(f"{kind} rank must be an integer >= 1, got {rank!r}")
    symbols = spec.get("symbols") or _take(pool, rank)
    return (FreeAbelian if kind == "free_abelian" else Free)(rank, symbols)


@dataclass(frozen=True)
class GroupPair:
    """A group with peripheral subgroups, each generated by a sub-alphabet.

    ``extra_generators`` enlarge the Cayley generating set beyond the
    standard letters (used to re-generate the same group); ball and coset
    enumeration always use the standard word metric.
    """

    ambient: GroupModel
    peripherals: tuple[tuple[str, ...], ...] = ()
    extra_generators: tuple[GroupElement, ...] = ()

    def __post_init__(self):
        seen = set()
        for p in self.peripherals:
            if not p:
                raise ConfigurationError("a peripheral needs at least one generator")
            for s in p:
                if s not in self.ambient.symbols:
                    raise ConfigurationError(f"peripheral symbol {s!r} is not an ambient generator")
            key = frozenset(p)
            if key in seen:
                raise ConfigurationError(f"peripheral {list(p)} is listed twice")
            seen.add(key)
            # adaptedness holds by construction: S ∩ P is exactly the sub-alphabet
            self.ambient.sub_model(tuple(p))
        for g in self.extra_generators:
            if g.is_identity:
                raise ConfigurationError("extra generators must be nontrivial")

    @classmethod
    def build(cls, ambient, peripherals=(), extra_generators=()) -> "GroupPair":
        model = make_group(ambient)
        periph = tuple(tuple(s for s in model.symbols if s in set(p)) for p in peripherals)
        extras = tuple(model.normal_form(w) for w in extra_generators)
        return cls(model, periph, extras)

    @classmethod
    def elementary(cls, model: GroupModel) -> "GroupPair":
        """The pair (P, {P}); its cusped space is a single horoball over P."""
        return cls(model, (model.symbols,))

    def peripheral_model(self, i: int) -> GroupModel:
        return self.ambient.sub_model(self.peripherals[i])

    def coset_key(self, i: int, g: GroupElement) -> GroupElement:
        return self.ambient.coset_key(g, frozenset(self.peripherals[i]))

    def coset_distance(self, g: GroupElement, i: int, rep: GroupElement) -> int:
        """Word distance from ``g`` to the coset rep·P_i."""
        diff = self.ambient.multiply(self.ambient.invert(g), rep)
        return self.ambient.length(self.coset_key(i, diff))

    def cayley_generators(self) -> list[GroupElement]:
        gens = self.ambient.generators()
        for g in self.extra_generators:
            for h in (g, self.ambient.invert(g)):
                if h not in gens:
                    gens.append(h)
        return gens

    def describe(self) -> dict:
        return {
            "group": self.ambient.describe(),
            "peripherals": [list(p) for p in self.peripherals],
            "extra_generators": [str(g) for g in self.extra_generators],
        }


def distance(G: GroupModel, g: GroupElement, h: GroupElement) -> int:
    return G.distance(g, h)


def normal_form(G: GroupModel, raw) -> GroupElement:
    return G.normal_form(raw)


def ball(G: GroupModel, center: GroupElement, radius: int, max_radius: int | None = None) -> list[GroupElement]:
    return G.ball(center, radius, max_radius=max_radius)


def enumerate_peripheral_cosets(
    pair: GroupPair, radius: int, max_radius: int | None = None
) -> list[tuple[int, GroupElement]]:
    """One ``(peripheral index, representative)`` per coset γP meeting ball(e, radius).

    Representatives are the shortest (hence shortlex-minimal) coset elements;
    order is discovery order along the shortlex ball enumeration.
    """
    seen = set()
    out = []
    for g in pair.ambient.ball(IDENTITY, radius, max_radius=max_radius):
        for i in range(len(pair.peripherals)):
            key = (i, pair.coset_key(i, g))
            if key not in seen:
                seen.add(key)
                out.append(key)
    return out

