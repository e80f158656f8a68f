import pytest

from mvlam.errors import DomainError, ParseError
from mvlam.types import (
    Arrow,
    Forall,
    Prod,
    TVar,
    arrow_type,
    base_radix,
    base_type,
    dup_type,
    ftv,
    parse_type,
    print_type,
    subst_type,
    type_alpha_eq,
    value_signature,
)

a, b = TVar("'a"), TVar("'b")


def test_ftv_examples():
    assert ftv(a) == {"'a"}
    assert ftv(Forall("'a", Arrow(a, a))) == set()
    assert ftv(Prod(a, Forall("'a", a))) == {"'a"}
    assert ftv(Arrow(a, Forall("'b", Arrow(b, a)))) == {"'a"}


def test_subst_type_examples():
    t2 = base_type(2)
    assert subst_type(Arrow(a, a), "'a", t2) == Arrow(t2, t2)
    assert subst_type(Forall("'a", a), "'a", b) == Forall("'a", a)


def test_subst_type_avoids_capture():
    got = subst_type(Forall("'b", Arrow(a, b)), "'a", b)
    assert isinstance(got, Forall) and got.var != "'b"
    assert ftv(got) == {"'b"}
    assert type_alpha_eq(got, parse_type("forall 'c. 'b -> 'c"))


def test_instantiating_base_type_at_itself():
    # the type of h in the unary builder: T_r with 'a := T_r
    t3 = base_type(3)
    inst = subst_type(t3.body, t3.var, t3)
    endo = Arrow(t3, t3)
    assert inst == Arrow(endo, Arrow(endo, Arrow(endo, endo)))


def test_base_type_radix_two():
    want = parse_type("forall 'a. ('a->'a) -> ('a->'a) -> ('a->'a)")
    assert type_alpha_eq(base_type(2), want)
    assert print_type(base_type(2), sugar=False) == "forall 'a. ('a -> 'a) -> ('a -> 'a) -> 'a -> 'a"


def test_arrow_and_dup_types():
    t = base_type(4)
    assert arrow_type(0, 4) == t
    assert arrow_type(2, 4) == Arrow(t, Arrow(t, t))
    assert dup_type(2, 4) == Arrow(t, Prod(t, t))
    assert dup_type(3, 2) == Arrow(base_type(2), Prod(base_type(2), Prod(base_type(2), base_type(2))))


@pytest.mark.parametrize("call", [lambda: base_type(0), lambda: arrow_type(-1, 2),
                                  lambda: dup_type(1, 2)])
def test_type_builders_reject_bad_sizes(call):
    with pytest.raises(DomainError):
        call()


def test_sugar_and_signature():
    t = parse_type("T3 -> T2 -> T4")
    assert value_signature(t) == ((3, 2), 4)
    assert base_radix(parse_type("T5")) == 5
    assert base_radix(parse_type("forall 'a. 'a -> 'a")) is None
    assert print_type(t) == "T3 -> T2 -> T4"


def test_precedence():
    t = parse_type("'a * 'b -> 'a")
    assert t == Arrow(Prod(a, b), a)
    assert parse_type("'a -> 'b -> 'a") == Arrow(a, Arrow(b, a))
    assert parse_type("'a * 'b * 'a") == Prod(a, Prod(b, a))


def test_round_trip():
    for text in ("forall 'a. 'a -> 'a", "(T2 -> T2) -> T2 -> T2", "T3 -> T3 * T3 * T3",
                 "forall 'x. forall 'y. 'x * 'y -> 'y * 'x"):
        t = parse_type(text)
        assert type_alpha_eq(parse_type(print_type(t)), t)
        assert type_alpha_eq(parse_type(print_type(t, sugar=False)), t)


@pytest.mark.parametrize("text", ["'a ->", "forall a. a", "T", "('a", "'a 'b"])
def test_type_parse_errors(text):
    with pytest.raises(ParseError):
        parse_type(text)
