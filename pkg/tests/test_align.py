import numpy as np
import pytest
from scipy.optimize import minimize

from lexbridge.align import (
    CcaModel, LsModel, SeedLexicon, build_enhanced_space, fit_cca, fit_least_squares,
    load_model, project_space, save_model, select_bridges,
)
from lexbridge.embedspace import EmbeddingSpace, cosine
from lexbridge.errors import DataError
from lexbridge.evalkit import pearson
from lexbridge.senses import SenseMap
from lexbridge.synthetic import random_orthogonal


def seed_of(X, Y):
    return SeedLexicon.from_arrays(X, Y)


# -- bridges -----------------------------------------------------------------

def _spaces(words_c, words_k, d=2):
    c = EmbeddingSpace(words_c, np.arange(len(words_c) * d, dtype=float).reshape(-1, d))
    k = EmbeddingSpace(words_k, np.ones((len(words_k), d)))
    return c, k


def test_bridges_monosemy_filter():
    c, k = _spaces(["cat", "bank"], ["cat", "bank"])
    seed = select_bridges(c, k, SenseMap({"cat": ["c1"], "bank": ["b1", "b2"]}))
    assert seed.words == ["cat"]
    np.testing.assert_array_equal(seed.X, c.subset(["cat"]).vectors)


def test_bridges_require_both_spaces():
    c, k = _spaces(["cat", "dog"], ["dog"])
    seed = select_bridges(c, k, SenseMap({"cat": ["c1"], "dog": ["d1"]}))
    assert seed.words == ["dog"]


def test_bridges_ranking_and_cap():
    words = [f"w{i}" for i in range(10)]
    c, k = _spaces(words, words)
    senses = SenseMap({w: [w + ".n"] for w in words})
    freq = {"w0": 1, "w1": 9, "w2": 5, "w3": 9, "w4": 7}
    seed = select_bridges(c, k, senses, max_bridges=3, ranking=freq)
    assert seed.words == ["w1", "w3", "w4"]
    assert select_bridges(c, k, senses, max_bridges=3).words == ["w0", "w1", "w2"]


def test_bridges_empty_intersection_fatal():
    c, k = _spaces(["a"], ["b"])
    with pytest.raises(DataError):
        select_bridges(c, k, SenseMap({"a": ["x"], "b": ["y"]}))


def test_seed_lexicon_rejects_duplicates():
    with pytest.raises(ValueError):
        SeedLexicon(["a", "a"], np.zeros((2, 1)), np.zeros((2, 1)))


# -- CCA ---------------------------------------------------------------------

def test_identical_views_correlate_perfectly(rng):
    X = rng.standard_normal((200, 6))
    m = fit_cca(seed_of(X, X), 0.0)
    np.testing.assert_allclose(m.correlations, 1.0, atol=1e-8)
    Q = random_orthogonal(6, rng)
    m = fit_cca(seed_of(X, X @ Q), 0.0)
    np.testing.assert_allclose(m.correlations, 1.0, atol=1e-8)


def test_one_dimensional_cca_is_pearson():
    X = np.array([[1.0], [2.0], [3.0]])
    Y = np.array([[2.0], [4.0], [7.0]])
    rho = fit_cca(seed_of(X, Y), 0.0).correlations[0]
    assert abs(rho - pearson(X[:, 0], Y[:, 0])) < 1e-10
    assert rho == pytest.approx(15 / np.sqrt(228), abs=1e-12)


def brute_force_first_correlation(X, Y):
    def corr(angles):
        a, b = angles
        return np.corrcoef(X @ [np.cos(a), np.sin(a)], Y @ [np.cos(b), np.sin(b)])[0, 1]

    # directions are defined up to sign, so a half-turn grid per view covers them
    grid = np.deg2rad(np.arange(180))
    best = max(((corr((a, b)), a, b) for a in grid for b in grid))
    res = minimize(lambda t: -corr(t), x0=[best[1], best[2]], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    return max(best[0], -res.fun)


def test_two_dimensional_matches_direction_search(rng):
    X = rng.standard_normal((300, 2))
    Y = X @ np.array([[0.8, -0.3], [0.4, 0.9]]) + 0.7 * rng.standard_normal((300, 2))
    rho = fit_cca(seed_of(X, Y), 0.0).correlations[0]
    assert abs(rho - brute_force_first_correlation(X, Y)) < 1e-4


def test_unit_variance_and_uncorrelated_projections(rng):
    X = rng.standard_normal((500, 8))
    Y = X[:, :5] @ rng.standard_normal((5, 5)) + 0.5 * rng.standard_normal((500, 5))
    model = fit_cca(seed_of(X, Y), 0.0)
    assert model.k == 5
    for proj in ((X - model.mean_C) @ model.W_C, (Y - model.mean_K) @ model.W_K):
        cov = np.cov(proj, rowvar=False, ddof=1)
        np.testing.assert_allclose(np.diag(cov), 1.0, atol=1e-6)
        off = cov - np.diag(np.diag(cov))
        assert np.abs(off).max() <= 1e-6
    # the i-th pair of components has the i-th canonical correlation
    pc = (X - model.mean_C) @ model.W_C
    pk = (Y - model.mean_K) @ model.W_K
    for i in range(model.k):
        assert np.corrcoef(pc[:, i], pk[:, i])[0, 1] == pytest.approx(model.correlations[i], abs=1e-8)


def test_correlations_sorted_and_bounded(rng):
    X = rng.standard_normal((80, 7))
    Y = rng.standard_normal((80, 4))
    c = fit_cca(seed_of(X, Y)).correlations
    assert np.all(np.diff(c) <= 0)
    assert np.all(c >= -1e-8) and np.all(c <= 1 + 1e-8)


@pytest.mark.parametrize("kind", ["orthogonal", "diagonal", "general"])
def test_invariance_under_linear_transform_of_x(rng, kind):
    X = rng.standard_normal((150, 4))
    Y = X @ rng.standard_normal((4, 3)) + rng.standard_normal((150, 3))
    if kind == "orthogonal":
        A = random_orthogonal(4, rng)
    elif kind == "diagonal":
        A = np.diag([0.1, 3.0, 7.0, 0.5])
    else:
        A = rng.standard_normal((4, 4)) + 2 * np.eye(4)
    base = fit_cca(seed_of(X, Y), 0.0).correlations
    np.testing.assert_allclose(fit_cca(seed_of(X @ A, Y), 0.0).correlations, base, atol=1e-6)


def test_truncation_option(rng):
    X, Y = rng.standard_normal((50, 4)), rng.standard_normal((50, 4))
    m = fit_cca(seed_of(X, Y), n_components=2)
    assert m.W_C.shape == (4, 2) and len(m.correlations) == 2


def test_cca_errors(rng):
    with pytest.raises(DataError):
        fit_cca(seed_of(np.ones((1, 2)), np.ones((1, 2))))
    X = rng.standard_normal((20, 3))
    rank_deficient = np.column_stack([X[:, 0], X[:, 0], X[:, 1]])
    with pytest.raises(np.linalg.LinAlgError, match="regularization"):
        fit_cca(seed_of(rank_deficient, X), 0.0)
    # the default regularization survives the same seed
    assert np.isfinite(fit_cca(seed_of(rank_deficient, X)).W_C).all()
    with pytest.warns(RuntimeWarning):
        fit_cca(seed_of(X[:3], X[:3]), 1e-3)


# -- least squares -----------------------------------------------------------

def test_ls_identity_and_scaling(rng):
    Y = rng.standard_normal((30, 4))
    np.testing.assert_allclose(fit_least_squares(seed_of(Y, Y)).M, np.eye(4), atol=1e-8)
    np.testing.assert_allclose(fit_least_squares(seed_of(2 * Y, Y)).M, 2 * np.eye(4), atol=1e-8)


def test_ls_matches_gradient_descent(rng):
    X, Y = rng.standard_normal((5, 3)), rng.standard_normal((5, 3))
    ridge = 0.1

    def objective(M):
        return np.sum((Y @ M - X) ** 2) + ridge * np.sum(M * M)

    M = np.zeros((3, 3))
    step = 1.0 / (2 * (np.linalg.norm(Y, 2) ** 2 + ridge))
    for _ in range(20000):
        M -= step * (2 * Y.T @ (Y @ M - X) + 2 * ridge * M)
    got = fit_least_squares(seed_of(X, Y), ridge).M
    assert abs(objective(got) - objective(M)) < 1e-6


def test_ls_singular():
    Y = np.array([[1.0, 1.0], [2.0, 2.0]])
    with pytest.raises(np.linalg.LinAlgError):
        fit_least_squares(seed_of(Y, Y), 0.0)


# -- projection and enhanced space -------------------------------------------

def test_project_identity_and_null(rng):
    s = EmbeddingSpace(["a", "b"], rng.standard_normal((2, 3)))
    np.testing.assert_array_equal(project_space(s, np.eye(3), np.zeros(3)).vectors, s.vectors)
    W = np.eye(3)
    W[:, 1] = 0
    one = EmbeddingSpace(["a"], [[1.0, 2.0, 3.0]])
    assert project_space(one, W, np.zeros(3)).vectors[0, 1] == 0
    with pytest.raises(ValueError):
        project_space(s, np.eye(2), np.zeros(2))


def test_projected_seed_has_unit_variance(rng):
    X = rng.standard_normal((100, 4))
    Y = X @ rng.standard_normal((4, 4)) + rng.standard_normal((100, 4))
    model = fit_cca(seed_of(X, Y), 0.0)
    space = EmbeddingSpace([f"w{i}" for i in range(100)], X)
    proj = model.project_corpus(space).vectors
    np.testing.assert_allclose(proj.var(axis=0, ddof=1), 1.0, atol=1e-6)


def _toy_model(dc, dk):
    k = min(dc, dk)
    return CcaModel(np.eye(dc)[:, :k], np.eye(dk)[:, :k], np.zeros(dc), np.zeros(dk), np.ones(k))


def test_enhanced_union_disjoint(rng):
    c = EmbeddingSpace(["a", "b", "c"], rng.standard_normal((3, 2)))
    k = EmbeddingSpace(["d", "e", "f", "g"], rng.standard_normal((4, 2)))
    e = build_enhanced_space(c, k, _toy_model(2, 2))
    assert len(e) == 7 and e.words == ["a", "b", "c", "d", "e", "f", "g"]


@pytest.mark.parametrize("policy", ["corpus", "kb", "average"])
def test_conflict_policies(rng, policy):
    c = EmbeddingSpace(["a", "b"], rng.standard_normal((2, 3)))
    k = EmbeddingSpace(["b", "z"], rng.standard_normal((2, 3)))
    model = fit_cca(seed_of(rng.standard_normal((40, 3)), rng.standard_normal((40, 3))))
    e = build_enhanced_space(c, k, model, conflict=policy)
    assert len(e) == len(c) + len(k) - 1
    pc, pk = model.project_corpus(c)["b"], model.project_kb(k)["b"]
    want = {"corpus": pc, "kb": pk, "average": 0.5 * (pc + pk)}[policy]
    np.testing.assert_array_equal(e["b"], want)
    np.testing.assert_array_equal(e["z"], model.project_kb(k)["z"])


def test_enhanced_with_ls_model(rng):
    c = EmbeddingSpace(["a"], rng.standard_normal((1, 3)))
    k = EmbeddingSpace(["a", "z"], rng.standard_normal((2, 2)))
    M = rng.standard_normal((2, 3))
    e = build_enhanced_space(c, k, LsModel(M))
    np.testing.assert_array_equal(e["a"], c["a"])
    np.testing.assert_allclose(e["z"], k["z"] @ M)


def test_rotation_recovery_small(rng):
    X = rng.standard_normal((300, 10))
    Q = random_orthogonal(10, rng)
    words = [f"w{i}" for i in range(300)]
    c = EmbeddingSpace(words[:250], X[:250])
    k = EmbeddingSpace(words, X @ Q)
    model = fit_cca(SeedLexicon.from_spaces(words[:200], c, k), 0.0)
    e = build_enhanced_space(c, k, model)
    held = EmbeddingSpace(words[250:], X[250:])
    proj = model.project_corpus(held)
    assert min(cosine(e[w], proj[w]) for w in words[250:]) >= 0.99


# -- model files -------------------------------------------------------------

def test_model_round_trip(tmp_path, rng):
    m = fit_cca(seed_of(rng.standard_normal((30, 4)), rng.standard_normal((30, 3))))
    save_model(m, tmp_path / "m.cca")
    assert (tmp_path / "m.cca").read_text().splitlines()[0] == "CCA1"
    r = load_model(tmp_path / "m.cca")
    for a in ("W_C", "W_K", "mean_C", "mean_K", "correlations"):
        np.testing.assert_allclose(getattr(r, a), getattr(m, a), rtol=1e-6, atol=1e-12)
    ls = fit_least_squares(seed_of(rng.standard_normal((30, 4)), rng.standard_normal((30, 3))), 0.5)
    save_model(ls, tmp_path / "m.ls")
    r = load_model(tmp_path / "m.ls")
    assert (tmp_path / "m.ls").read_text().startswith("LS1\n")
    np.testing.assert_allclose(r.M, ls.M, rtol=1e-6)
    assert r.ridge == 0.5


def test_model_bad_files(write):
    with pytest.raises(DataError):
        load_model(write("m.txt", "XYZ\n"))
    with pytest.raises(DataError):
        load_model(write("m.txt", "CCA1\ndims 2 2 2\nreg 0 0\nmean_c 1\n"))
