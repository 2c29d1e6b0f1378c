import pytest

from core.errors import MalformedInputError, PreconditionError, SolverIntegrationError
from core.ramsey import FAILS, HOLDS, TRIVIALLY_HOLDS, ArrowQuery, arrow_check, verify_bad_coloring
from core.sat_bridge import (
    encode_bad_coloring,
    export_bad_coloring_cnf,
    import_sat_model,
    read_cnf_query,
    sat_arrow_check,
    solve_cnf_file,
    write_model_file,
)
from utils.library import linear_order

LO2, LO3 = linear_order(2), linear_order(3)


def _constant_model(items: int) -> str:
    literals = []
    for e in range(items):
        literals += [2 * e + 1, -(2 * e + 2)]
    return " ".join(map(str, literals)) + " 0\n"


def test_export_counts(tmp_path):
    path, variables, clauses = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    assert path.is_file()
    assert variables == 20
    assert clauses == 40
    text = path.read_text()
    assert "c fingerprint " in text
    assert "c x 1 = emb 0 color 1" in text


def test_query_survives_the_file(tmp_path):
    path, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    query, fingerprint = read_cnf_query(path)
    assert query.C == linear_order(5)
    assert (query.r, query.k) == (2, 1)
    assert len(fingerprint) == 64


def test_solve_and_import_bad_coloring(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    model = solve_cnf_file(cnf)
    assert model is not None
    model_path = write_model_file(model, tmp_path / "lo5.model")
    gamma = import_sat_model(model_path, cnf)
    assert gamma.is_full
    assert verify_bad_coloring(gamma, LO3, 1)


def test_unsatisfiable_means_arrow_holds(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(6), LO3, LO2, 2, 1, tmp_path / "lo6.cnf")
    model = solve_cnf_file(cnf)
    assert model is None
    model_path = write_model_file(model, tmp_path / "lo6.model")
    assert model_path.read_text().startswith("s UNSATISFIABLE")
    assert import_sat_model(model_path, cnf) is None


def test_plain_integer_model_is_accepted_and_checked(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    bogus = tmp_path / "constant.model"
    bogus.write_text(_constant_model(10))
    with pytest.raises(SolverIntegrationError):
        import_sat_model(bogus, cnf)


def test_model_missing_variables_rejected(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    short = tmp_path / "short.model"
    short.write_text("s SATISFIABLE\nv 1 -2 0\n")
    with pytest.raises(SolverIntegrationError):
        import_sat_model(short, cnf)


def test_garbage_model_rejected(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    garbage = tmp_path / "garbage.model"
    garbage.write_text("v one two 0\n")
    with pytest.raises(SolverIntegrationError):
        import_sat_model(garbage, cnf)


def test_fingerprint_mismatch_rejected(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    lines = cnf.read_text().splitlines()
    lines = ["c fingerprint " + "0" * 64 if line.startswith("c fingerprint ") else line for line in lines]
    cnf.write_text("\n".join(lines) + "\n")
    model = tmp_path / "any.model"
    model.write_text(_constant_model(10))
    with pytest.raises(SolverIntegrationError):
        import_sat_model(model, cnf)


def test_missing_cnf_file(tmp_path):
    with pytest.raises(SolverIntegrationError):
        read_cnf_query(tmp_path / "absent.cnf")


def test_trivial_query_is_not_encoded():
    with pytest.raises(PreconditionError):
        encode_bad_coloring(LO3, LO3, LO2, 1, 1)


@pytest.mark.parametrize("n, verdict", [(5, FAILS), (6, HOLDS)])
def test_sat_agrees_with_search(n, verdict):
    via_sat = sat_arrow_check(linear_order(n), LO3, LO2, 2, 1)
    via_search = arrow_check(linear_order(n), LO3, LO2, 2, 1)
    assert via_sat.verdict == via_search.verdict == verdict
    assert via_sat.verify()


@pytest.mark.parametrize("r, k", [(1, 1), (2, 1), (2, 3)])
def test_sat_agrees_with_search_when_B_does_not_embed(r, k):
    LO4 = linear_order(4)
    via_sat = sat_arrow_check(LO3, LO4, LO2, r, k)
    via_search = arrow_check(LO3, LO4, LO2, r, k)
    assert via_sat.verdict == via_search.verdict == FAILS
    assert via_sat.coloring == via_search.coloring
    assert via_sat.verify()


def test_sat_trivial_when_B_embeds():
    assert sat_arrow_check(LO3, LO3, LO2, 1, 1).verdict == TRIVIALLY_HOLDS
    assert arrow_check(LO3, LO3, LO2, 1, 1).verdict == TRIVIALLY_HOLDS


def test_import_with_query_instead_of_cnf(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    model_path = write_model_file(solve_cnf_file(cnf), tmp_path / "lo5.model")
    query = ArrowQuery(linear_order(5), LO3, LO2, 2, 1)
    assert import_sat_model(model_path, query=query) == import_sat_model(model_path, cnf)


def test_import_needs_exactly_one_query_source(tmp_path):
    cnf, _, _ = export_bad_coloring_cnf(linear_order(5), LO3, LO2, 2, 1, tmp_path / "lo5.cnf")
    model_path = write_model_file(solve_cnf_file(cnf), tmp_path / "lo5.model")
    with pytest.raises(MalformedInputError):
        import_sat_model(model_path)
    with pytest.raises(MalformedInputError):
        import_sat_model(model_path, cnf, query=ArrowQuery(linear_order(5), LO3, LO2, 2, 1))
