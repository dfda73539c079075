"""Built-in example programs as surface-syntax source text.

Each builder returns a source string loadable with
``parser.load_source``. The oracle variant of SEND+MORE=MONEY declares
an external function; pass ``EXTERNALS`` to the loader to supply it.
The packaged ``programs/`` directory ships the same sources for CLI use
and a test keeps the two in sync.
"""

from __future__ import annotations

from textwrap import dedent

SEND_LETTERS = ("y", "d", "e", "n", "r", "o", "m", "s")
SEND_VARIANTS = ("big", "small", "small+oracle")


def _lit(value) -> str:
    return str(value) if isinstance(value, int) else "'" + str(value)


def make_nums(n: int, name: str = "num") -> str:
    """Unit facts name(1..n) as one fact predicate."""
    return _facts(name, range(1, n + 1))


def _facts(name: str, values, per_line: int = 5) -> str:
    values = list(values)
    if not values:
        raise ValueError("a fact predicate needs at least one value")
    clauses = [f"[(== {_lit(v)} x)]" for v in values]
    head = f"(defineo ({name} x)\n  (conde "
    pad = " " * len("  (conde ")
    lines = [
        " ".join(clauses[i:i + per_line]) for i in range(0, len(clauses), per_line)
    ]
    return head + ("\n" + pad).join(lines) + "))"


def pick_free_program(n: int, variables: int = 2, row_constraint: bool = False) -> str:
    """The pick/free choice board over num(1..n).

    With two variables the board is n x n (2^(n*n) stable models; the
    row constraint cuts repeats within a row). With one variable there
    are 2^n models and no constraint applies.
    """
    if variables not in (1, 2):
        raise ValueError("variables must be 1 or 2")
    if variables == 1:
        if row_constraint:
            raise ValueError("the row constraint needs two variables")
        return make_nums(n) + dedent("""
            (defineo (pick x) (num x) (noto (free x)))
            (defineo (free x) (num x) (noto (pick x)))
            (run* (q) (pick q))
            """)
    source = make_nums(n) + dedent("""
        (defineo (pick x y) (num x) (num y) (noto (free x y)))
        (defineo (free x y) (num x) (num y) (noto (pick x y)))
        """)
    if row_constraint:
        source += "(constrainto [(pick x y) (pick u v)] [(= x u) (not (= y v))])\n"
    source += "(run* (q) (fresh (x y) (pick x y) (== q (list x y))))\n"
    return source


def arithmetic_relations(lo: int, hi: int) -> str:
    """pluso/minuso/multipo/divido with their duals over nums(lo..hi)."""
    if lo > hi:
        raise ValueError("empty domain")
    return _facts("nums", range(lo, hi + 1)) + dedent("""
        (defineo (pluso x y z) (nums x) (nums y) (nums z) (noto (n_pluso x y z)))
        (defineo (n_pluso x y z) (nums x) (nums y) (nums z) (noto (pluso x y z)))
        (constrainto [(pluso x y z)] [(not (= (+ x y) z))])
        (constrainto [(n_pluso x y z)] [(= (+ x y) z)])
        (defineo (minuso z x y) (pluso x y z))
        (defineo (multipo x y z) (nums x) (nums y) (nums z) (noto (n_multipo x y z)))
        (defineo (n_multipo x y z) (nums x) (nums y) (nums z) (noto (multipo x y z)))
        (constrainto [(multipo x y z)] [(not (= (* x y) z))])
        (constrainto [(n_multipo x y z)] [(= (* x y) z)])
        (defineo (divido x y q r)
          (nums x) (nums y) (nums q) (nums r) (noto (n_divido x y q r)))
        (defineo (n_divido x y q r)
          (nums x) (nums y) (nums q) (nums r) (noto (divido x y q r)))
        (constrainto [(divido x y q r)] [(or (= y 0) (>= r y)
                                             (not (= (+ (* y q) r) x)))])
        (constrainto [(n_divido x y q r)] [(and (not (= y 0)) (< r y)
                                                (= (+ (* y q) r) x))])
        """)


_SEND_CORE = dedent("""\
    (defineo (letters l)
      (conde [(== 'y l)] [(== 'd l)] [(== 'e l)] [(== 'n l)]
             [(== 'r l)] [(== 'o l)] [(== 'm l)] [(== 's l)]))
    (defineo (values v)
      (conde [(== 0 v)] [(== 1 v)] [(== 2 v)] [(== 3 v)] [(== 4 v)]
             [(== 5 v)] [(== 6 v)] [(== 7 v)] [(== 8 v)] [(== 9 v)]))
    (defineo (assign l v) (letters l) (values v) (noto (n_assign l v)))
    (defineo (n_assign l v) (letters l) (values v) (noto (assign l v)))
    (constrainto [(assign l1 v1) (assign l2 v2)]
                 [(eq? l1 l2) (not (= v1 v2))])
    (constrainto [(assign l1 v1) (assign l2 v2)]
                 [(not (eq? l1 l2)) (= v1 v2)])
    (defineo (assigned l) (fresh (v) (letters l) (values v) (assign l v)))
    (constrainto [(letters l1) (noto (assigned l2))] [(eq? l1 l2)])
    """)

_SEND_BIG_EQUATION = dedent("""\
    (constrainto [(assign 's s) (assign 'e e) (assign 'n n) (assign 'd d)
                  (assign 'm m) (assign 'o o) (assign 'r r) (assign 'y y)]
                 [(not (= (+ (* s 1000) (* e 100) (* n 10) (* d 1)
                             (* m 1000) (* o 100) (* r 10) (* e 1))
                          (+ (* m 10000) (* o 1000) (* n 100) (* e 10) (* y 1))))])
    """)

_SEND_SMALL_EQUATIONS = dedent("""\
    (constrainto [(assign 'd d) (assign 'e e) (assign 'y y)]
                 [(not (= y (mod (+ d e) 10)))])
    (constrainto [(assign 'd d) (assign 'e e) (assign 'n n) (assign 'r r)]
                 [(not (= e (mod (+ n r (floor (/ (+ d e) 10))) 10)))])
    (constrainto [(assign 'd d) (assign 'n n) (assign 'r r)
                  (assign 'e e) (assign 'o o)]
                 [(not (= n (mod (+ o e
                                  (floor (/ (+ n r
                                  (floor (/ (+ d e) 10))) 10))) 10)))])
    (constrainto [(assign 'n n) (assign 'd d) (assign 'r r) (assign 'e e)
                  (assign 'o o) (assign 's s) (assign 'm m)]
                 [(not (= o (mod (+ m s
                                  (floor (/ (+ e o
                                  (floor (/ (+ n r
                                  (floor (/ (+ d e) 10))) 10))) 10))) 10)))])
    (constrainto [(assign 'n n) (assign 'd d) (assign 'r r) (assign 'e e)
                  (assign 'o o) (assign 's s) (assign 'm m)]
                 [(not (= m (floor (/ (+ s m
                             (floor (/ (+ e o
                             (floor (/ (+ n r
                             (floor (/ (+ d e) 10))) 10))) 10))) 10))))])
    """)

_SEND_ORACLE = dedent("""\
    (external oracle 2)
    (constrainto [(assign l v)] [(not (oracle l v))])
    """)

_SEND_LEADING_ZERO = dedent("""\
    (constrainto [(assign 's v)] [(= v 0)])
    (constrainto [(assign 'm v)] [(= v 0)])
    """)

_SEND_QUERY = dedent("""\
    (run 1 (q)
      (fresh (s e n d m o r y)
        (assign 's s) (assign 'e e) (assign 'n n) (assign 'd d)
        (assign 'm m) (assign 'o o) (assign 'r r) (assign 'y y)
        (== q (list s e n d m o r y))))
    """)


def send_more_money(variant: str = "big") -> str:
    """The SEND+MORE=MONEY program: big, small or small+oracle variant.

    Variants share the facts, the assign/n_assign duals, the bijection
    and totality constraints, the two leading-zero constraints and the
    run-1 query; they differ only in the equation constraints. The
    oracle variant adds ``(external oracle 2)``; supply the function by
    passing EXTERNALS to the loader.
    """
    if variant not in SEND_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; pick one of {SEND_VARIANTS}")
    if variant == "big":
        equations = _SEND_BIG_EQUATION
    elif variant == "small":
        equations = _SEND_SMALL_EQUATIONS
    else:
        equations = _SEND_SMALL_EQUATIONS + _SEND_ORACLE
    return _SEND_CORE + equations + _SEND_LEADING_ZERO + _SEND_QUERY


def oracle(letter: str, value: int) -> bool:
    """Partial-answer oracle for SEND+MORE=MONEY: pins s=9, m=1, o=0."""
    if letter == "s":
        return value == 9
    if letter == "m":
        return value == 1
    if letter == "o":
        return value == 0
    return letter in ("e", "n", "d", "r", "y")


EXTERNALS = {"oracle": oracle}


def queens_program(n: int) -> str:
    """n-queens: queen/free duals, one queen per column in the query,
    row and column uniqueness plus the diagonal constraint."""
    if n < 1:
        raise ValueError("board size must be at least 1")
    rvars = [f"r{c}" for c in range(1, n + 1)]
    placements = " ".join(f"(queen {c} {rvars[c - 1]})" for c in range(1, n + 1))
    query = (
        f"(run* (q)\n  (fresh ({' '.join(rvars)})\n"
        f"    {placements}\n    (== q (list {' '.join(rvars)}))))"
    )
    return _facts("rows", range(1, n + 1)) + dedent("""
        (defineo (queen x y) (rows x) (rows y) (noto (free x y)))
        (defineo (free x y) (rows x) (rows y) (noto (queen x y)))
        (constrainto [(queen x y) (queen u v)] [(= x u) (not (= y v))])
        (constrainto [(queen x y) (queen u v)] [(not (= x u)) (= y v)])
        (constrainto [(queen x y) (queen u v)]
                     [(= (abs (- x u)) (abs (- y v)))
                      (not (= x u)) (not (= y v))])
        """) + query + "\n"
