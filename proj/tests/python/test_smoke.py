import math

import numpy as np
import pytest

import cgot


def diamond():
    g = cgot.ConnectionGraph(
        4, 1,
        [(0, 2, 1.0, -np.eye(1)), (0, 1, 1.0, np.eye(1)), (2, 3, 1.0, np.eye(1)), (1, 3, 1.0, np.eye(1))],
    )
    assert g.validate() == []
    return g


def path_flip():
    return cgot.ConnectionGraph(3, 1, [(0, 1, 1.0, np.eye(1)), (1, 2, 1.0, -np.eye(1))])


def dirac(n, node, mass=1.0):
    f = np.zeros((n, 1))
    f[node, 0] = mass
    return f


def test_graph_basics():
    g = cgot.ConnectionGraph.trivial(3, 2, [(0, 1), (1, 2)])
    assert g.n == 3 and g.d == 2 and g.num_edges == 2
    assert cgot.is_consistent(g)
    L = cgot.connection_laplacian(g).toarray()
    B = cgot.incidence(g).toarray()
    assert np.allclose(L, B @ B.T)
    back = cgot.ConnectionGraph.from_json(g.to_json())
    assert back.num_edges == 2


def test_invalid_sigma_reported():
    g = cgot.ConnectionGraph(2, 2, [(0, 1, 1.0, np.array([[1.0, 1.0], [0.0, 1.0]]))])
    assert any("orthogonal" in v for v in g.validate())
    with pytest.raises(cgot.ValidationError):
        cgot.laplacian_spectrum(g)


def test_kernel_and_feasibility():
    g = path_flip()
    k = cgot.kernel(g)
    assert k.shape == (3, 1)
    assert abs(abs(k[:, 0] @ np.array([1, 1, -1]) / math.sqrt(3)) - 1) < 1e-12
    assert not cgot.is_feasible(g, dirac(3, 0), dirac(3, 2))
    assert cgot.is_feasible(g, dirac(3, 0), dirac(3, 2, -1.0))
    rep = cgot.check_feasibility(g, dirac(3, 0), dirac(3, 2))
    assert not rep["feasible"] and rep["violated"] == [0]
    with pytest.raises(cgot.InfeasibleError):
        cgot.solve(g, dirac(3, 0), dirac(3, 2))


def test_solve_diamond():
    r = cgot.solve(diamond(), dirac(4, 0), dirac(4, 3, 0.5), lam=1.0, max_epochs=200000)
    norms = sorted(np.linalg.norm(r["flow"], axis=1))
    assert np.allclose(norms, [0.25, 0.25, 0.75, 0.75], atol=1e-5)
    assert r["report"]["converged"]
    assert abs(r["report"]["gap"]) <= 1e-5
    oracle = cgot.oracle_solve(diamond(), dirac(4, 0), dirac(4, 3, 0.5), 1.0)
    assert np.allclose(sorted(np.linalg.norm(oracle, axis=1)), norms, atol=1e-5)


def test_wasserstein_path():
    g = cgot.ConnectionGraph.trivial(3, 1, [(0, 1), (1, 2)])
    w = cgot.wasserstein(g, dirac(3, 0), dirac(3, 2), lam=0.01, learning_rate=0.005, max_epochs=2000000)
    assert abs(w - 2.0) < 1e-3
    assert math.isinf(cgot.wasserstein(path_flip(), dirac(3, 0), dirac(3, 2)))


def test_pseudo_dirac_and_interpolation():
    g = cgot.ConnectionGraph.trivial(4, 2, [(0, 1), (1, 2), (2, 3)])
    a = cgot.pseudo_dirac(4, 2, 0, 0)
    b = cgot.pseudo_dirac(4, 2, 3, 1)
    assert a.shape == (4, 2) and np.allclose(a.sum(axis=0), 1)
    r = cgot.solve(g, a, b, lam=1.0, max_epochs=400000, grad_tol=1e-11)
    states = cgot.interpolate(g, a, r["flow"], cgot.hop_diameter(g) + 1)
    assert np.array_equal(states[0], a)
    assert np.allclose(states[-1], b, atol=1e-8)
    assert cgot.edge_rings(g, [0]) == [0, 1, 2]


def test_local_pca_sphere():
    pts = cgot.sample_sphere_patch(np.radians(7), np.radians(67), np.radians(-30), np.radians(120), 9, 20)
    g, frames = cgot.local_pca(pts, 0.45, 2)
    assert g.n == len(frames) == pts.shape[0]
    dev = np.mean([np.linalg.norm(f.T @ p) for f, p in zip(frames, pts)])
    assert dev <= 0.15
    sk = cgot.epsilon_graph(pts, 0.45)
    assert sk["connected"]


def test_switching_and_clustering():
    rng = np.random.default_rng(0)
    g = diamond()
    tau = cgot.feasibility_switching(g)
    s = cgot.switch_graph(g, tau)
    assert np.allclose(cgot.laplacian_spectrum(g), cgot.laplacian_spectrum(s))
    fields = [rng.random((4, 1)) for _ in range(3)]
    fields = [f / f.sum() for f in fields]
    D = cgot.distance_matrix(g, fields, max_epochs=100000)
    assert np.allclose(D, D.T) and np.all(np.diag(D) == 0)
    dist = np.full((6, 6), 40.0)
    dist[:3, :3] = 0.0
    dist[3:, 3:] = 0.0
    labels = cgot.spectral_cluster(dist, 2)
    assert labels == [0, 0, 0, 1, 1, 1]


def test_hurdat():
    text = (
        "AL092011, IRENE, 2,\n"
        "20110821, 0000,  , TS, 15.0N,  59.0W,  45, 1006,\n"
        "20110821, 0600, L, TS, 16.0N,  60.6W,  50, 1006,\n"
    )
    tracks, diags = cgot.parse_hurdat(text)
    assert diags == []
    assert tracks[0]["id"] == "AL092011"
    assert tracks[0]["samples"][0][1:] == (15.0, -59.0)
    _, bad = cgot.parse_hurdat(text.replace(", 2,", ", 3,"))
    assert bad and bad[0][0] == 1
