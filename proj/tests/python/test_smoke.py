import cvxpy as cp
import numpy as np
import pytest

import hsvm


def data(seed, n=40, p=3):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, p))
    y = np.where(x[:, 0] + 0.5 * x[:, 1] + 0.7 * rng.standard_normal(n) > 0, 1.0, -1.0)
    y[0], y[1] = 1.0, -1.0
    return x, y


def hinge(x, y, beta, b):
    return cp.sum(cp.pos(1 - cp.multiply(y, x @ beta + b)))


def test_lp_textbook():
    out = hsvm.solve_lp(np.array([-1.0, -1.0]), np.array([[1.0, 2.0], [3.0, 1.0]]), ["<=", "<="],
                        np.array([4.0, 6.0]))
    assert out["status"] == "optimal"
    assert out["objective"] == pytest.approx(-2.8)
    assert np.allclose(out["x"], [1.6, 1.2])


def test_lp_status():
    a = np.array([[1.0]])
    assert hsvm.solve_lp(np.array([1.0]), a, [">="], np.array([1.0]))["objective"] == pytest.approx(1.0)
    assert hsvm.solve_lp(np.array([-1.0]), a, [">="], np.array([1.0]))["status"] == "unbounded"
    assert hsvm.solve_lp(np.array([1.0]), a, ["<="], np.array([-1.0]))["status"] == "infeasible"
    with pytest.raises(ValueError):
        hsvm.solve_lp(np.array([1.0]), a, ["<"], np.array([1.0]))


@pytest.mark.parametrize("lam", [0.1, 1.0, 5.0])
def test_l2_matches_cvxpy(lam):
    x, y = data(1)
    b0, beta, obj = hsvm.fit_l2_svm(x, y, lam)
    beta_v, b_v = cp.Variable(x.shape[1]), cp.Variable()
    ref = cp.Problem(cp.Minimize(hinge(x, y, beta_v, b_v) + lam * cp.sum_squares(beta_v))).solve()
    assert obj == pytest.approx(ref, rel=1e-5, abs=1e-6)


def test_svd_route_matches_direct():
    x, y = data(2, n=10, p=30)
    assert hsvm.fit_l2_svm_svd_reduced(x, y, 0.3)[2] == pytest.approx(hsvm.fit_l2_svm(x, y, 0.3)[2], abs=1e-6)


@pytest.mark.parametrize("lam", [0.2, 2.0])
def test_l1_matches_cvxpy(lam):
    x, y = data(3, p=6)
    _, beta, obj = hsvm.fit_l1_svm(x, y, lam)
    beta_v, b_v = cp.Variable(x.shape[1]), cp.Variable()
    ref = cp.Problem(cp.Minimize(hinge(x, y, beta_v, b_v) + lam * cp.norm1(beta_v))).solve()
    assert obj == pytest.approx(ref, rel=1e-6, abs=1e-6)


@pytest.mark.parametrize("policy", ["strong", "weak"])
def test_structured_matches_cvxpy(policy):
    x, y = data(4, p=2)
    design, names = hsvm.expand_polynomial(x)
    assert names == ["z1", "z2", "z1*z2", "z1^2", "z2^2"]
    _, beta, _ = hsvm.fit_l2_svm(design, y, 1.0)
    scores = design * beta
    lam = 0.5
    fit = hsvm.fit_structured(x, y, policy, lam=lam)

    theta, b = cp.Variable(5, nonneg=True), cp.Variable()
    cons = [theta[3] <= theta[0], theta[4] <= theta[1]]
    if policy == "strong":
        cons += [theta[2] <= theta[0], theta[2] <= theta[1]]
    else:
        cons += [theta[2] <= theta[0] + theta[1]]
    ref = cp.Problem(cp.Minimize(hinge(scores, y, theta, b) + lam * cp.sum(theta)), cons).solve()
    assert fit["objective"] == pytest.approx(ref, rel=1e-5, abs=1e-5)
    t = fit["theta"]
    assert t[3] <= t[0] + 1e-8 and t[4] <= t[1] + 1e-8
    assert np.allclose(fit["coefficients"], beta * t)


def test_structured_budget():
    x, y = data(5, p=2)
    fit = hsvm.fit_structured(x, y, "strong", big_m=0.7)
    assert fit["theta"].sum() <= 0.7 + 1e-9
    with pytest.raises(ValueError):
        hsvm.fit_structured(x, y, "strong", lam=1.0, big_m=1.0)


def test_spline_partition_of_unity():
    rng = np.random.default_rng(6)
    values = rng.standard_normal(200)
    b = hsvm.spline_basis(values, 5, np.linspace(values.min(), values.max(), 101))
    assert b.shape == (101, 5)
    assert np.abs(b.sum(axis=1) - 1).max() <= 1e-12
    assert (b >= 0).all()


def test_generator_and_bayes():
    x, y = hsvm.generate_example(2, 0.5, 50, seed=3)
    x2, y2 = hsvm.generate_example(2, 0.5, 50, seed=3)
    assert x.shape == (50, 7) and np.array_equal(x, x2) and np.array_equal(y, y2)
    assert set(np.unique(y)) <= {-1.0, 1.0}
    assert abs(hsvm.bayes_error(1, 0.0, 200000) - 0.133) < 0.006


def test_train_predict_and_benchmark():
    x, y = hsvm.generate_example(1, 0.0, 80, seed=7)
    model = hsvm.train(x, y, "shsvm", lam=1.0)
    assert model["format"] == "hsvm-model"
    labels = hsvm.predict(model, x)
    assert labels.shape == (80,) and set(np.unique(labels)) <= {-1.0, 1.0}
    assert (labels != y).mean() < 0.4
    with pytest.raises(ValueError):
        hsvm.train(x, y, "shsvm")
    cfg = {"n": 50, "replications": 2, "test_size": 200, "grid_size": 3, "initial_grid_size": 3,
           "bayes_samples": 2000, "methods": ["l1", "shsvm"]}
    a = hsvm.run_benchmark(cfg)
    assert a == hsvm.run_benchmark(cfg)
    with pytest.raises(ValueError, match="colour"):
        hsvm.run_benchmark({"colour": 1})


def test_exceptions():
    x, y = data(8)
    with pytest.raises(hsvm.ConfigError):
        hsvm.fit_l2_svm(x, y, 0.0)
    with pytest.raises(hsvm.DataError):
        hsvm.fit_l2_svm(x, np.ones(len(y)), 1.0)
