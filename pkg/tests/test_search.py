import pytest

from fib3pow2.search import (Solution, TableFormatError, check_solution, enumerate_oracle,
                             enumerate_solutions, read_table, shipped_table, verify_table, write_table)

# differences between the printed table and the exact search, frozen after
# checking each tuple by hand against F(n) + F(m) + F(l) and 2**a
MISSING = [(3, 3, 3, 3), (16, 16, 9, 11), (16, 16, 10, 11), (16, 16, 11, 11)]
EXTRA = [(11, 9, 8, 7), (16, 16, 9, 10), (16, 16, 10, 10), (16, 16, 11, 10), (16, 16, 13, 10)]


@pytest.fixture(scope="module")
def sols():
    return enumerate_solutions(550)


def test_check_solution():
    assert check_solution(11, 11, 11, 8) == (True, 135)  # 267 - 256 = 11, 256 - 121
    assert check_solution(5, 5, 5, 4).margin == 15
    assert not check_solution(100, 2, 2, 3).ok
    assert check_solution(3, 3, 3, 3).ok  # 2 + 2 + 2 = 6, |6 - 8| = 2 < 2.83
    assert not check_solution(11, 9, 8, 7).ok  # 89 + 34 + 21 = 144, |144 - 128| = 16 > 11.3
    with pytest.raises(ValueError):
        check_solution(0, 1, 1, 1)


def test_solution_canonical():
    with pytest.raises(ValueError):
        Solution(2, 3, 2, 1)
    with pytest.raises(ValueError):
        Solution(5, 4, 1, 3)
    assert Solution(5, 4, 3, 3) < Solution(6, 2, 2, 3)


def test_full_search(sols):
    assert len(sols) == 225
    assert max(s.n for s in sols) == 42 and max(s.a for s in sols) == 28
    assert all(check_solution(*s.astuple()).ok for s in sols)
    assert sols == sorted(set(sols))


def test_oracle_equivalence_100():
    fast = {s.astuple() for s in enumerate_solutions(100)}
    assert fast == enumerate_oracle(100)


def test_parallel_search_same():
    assert enumerate_solutions(60, jobs=2) == enumerate_solutions(60)


def test_cap_below_42():
    sols = enumerate_solutions(30)
    assert all(s.n <= 30 for s in sols) and len(sols) < 225


def test_shipped_table_diff(sols):
    diff = verify_table(solutions=sols)
    assert diff.table_count == 226 and diff.search_count == 225
    assert diff.missing == MISSING
    assert diff.extra == EXTRA
    assert diff.not_solutions == EXTRA
    assert not diff.ok and not diff.duplicates


def test_roundtrip(tmp_path, sols):
    p = tmp_path / "t.csv"
    write_table(sols, p)
    assert read_table(p) == [s.astuple() for s in sols]
    assert verify_table(p, solutions=sols).ok


@pytest.mark.parametrize("body", ["n,m,l\n1,2,3\n", "a,b,c,d\n", "n,m,l,a\n4,3,x,2\n",
                                  "n,m,l,a\n4,3,2\n", "n,m,l,a\n2,3,2,1\n", ""])
def test_bad_tables(tmp_path, body):
    p = tmp_path / "bad.csv"
    p.write_text(body)
    with pytest.raises(TableFormatError):
        read_table(p)


def test_duplicates_reported(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("n,m,l,a\n5,5,5,4\n5,5,5,4\n")
    assert verify_table(p, n_max=10).duplicates == [(5, 5, 5, 4)]


def test_shipped_table_present():
    assert shipped_table().is_file()
