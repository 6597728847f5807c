# Copyright 2026 The qequil Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
import subprocess

import numpy as np
import pytest

import qequil

KINDS = [
    "dos_histogram",
    "bath_ensemble",
    "beta_sweep",
    "zeno_probe",
    "chain2_sweep",
    "random_dm_distance",
    "correlation_sweep",
]


@pytest.mark.parametrize("kind", KINDS)
def test_default_config_echoes_kind(kind):
    cfg = qequil.default_config(kind)
    assert cfg["kind"] == kind
    assert cfg["samples"] >= 1


def test_dm_distance_run():
    out = qequil.run("random_dm_distance", {"dims": [2, 4], "samples": 25, "seed": 4})
    assert out["columns"] == ["dim", "sample", "distance"]
    assert len(out["rows"]) == 50
    assert out["csv"].endswith("\n") and "\r" not in out["csv"]
    dist = np.array([r[2] for r in out["rows"]])
    assert np.all((dist >= 0) & (dist <= 2))
    groups = out["summary"]["groups"]
    assert [g["keys"]["dim"] for g in groups] == [2, 4]
    assert groups[0]["aggregates"]["distance"]["mean"] == pytest.approx(dist[:25].mean(), abs=1e-12)


def test_runs_are_deterministic():
    cfg = {"n": 1, "k_values": [2], "betas": [1.0], "samples": 3, "time_points": 4, "seed": 9}
    a = qequil.run("bath_ensemble", cfg)
    b = qequil.run("bath_ensemble", json.dumps(cfg))
    assert a["csv"] == b["csv"]
    assert "system.json" in a["attachments"]


def test_config_errors_raise_value_error():
    with pytest.raises(ValueError):
        qequil.run("bath_ensemble", {"no_such_key": 1})
    with pytest.raises(ValueError):
        qequil.run("bath_ensemble", {"k_values": [1]})
    with pytest.raises(ValueError):
        qequil.default_config("not_a_kind")


def test_numerical_failures_raise_runtime_error():
    degenerate = {"n": 1, "locality_c": 2, "terms": []}
    cfg = {"n": 1, "k_values": [2], "samples": 1, "time_points": 2, "system": degenerate}
    with pytest.raises(RuntimeError) as info:
        qequil.run("bath_ensemble", cfg)
    assert isinstance(info.value, qequil.QequilError)
    assert not isinstance(info.value, ValueError)


def test_exact_chain_is_gibbs_sampler():
    e = np.array([-1.0, -0.2, 0.4, 1.3])
    p = qequil.exact_chain(e, 1.5)
    np.testing.assert_allclose(p.sum(axis=0), 1.0, atol=1e-14)
    g = np.exp(-1.5 * e)
    g /= g.sum()
    np.testing.assert_allclose(qequil.gibbs_weights(e, 1.5), g, atol=1e-15)
    np.testing.assert_allclose(qequil.stationary_distribution(p), g, atol=1e-12)
    np.testing.assert_allclose(p * g[None, :], (p * g[None, :]).T, atol=1e-15)


def test_approximate_chain_sharpens():
    e = np.array([-1.0, -0.2, 0.4, 1.3])
    p = qequil.exact_chain(e, 1.0)
    err = [np.abs(qequil.approximate_chain(e, 1.0, m) - p).sum() for m in (3, 6, 9)]
    assert err[2] < err[1] < err[0]


def test_trace_norm_matches_svd():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    a = a + a.conj().T
    assert qequil.trace_norm(a) == pytest.approx(np.linalg.svd(a, compute_uv=False).sum(), rel=1e-12)


def test_dirichlet_rows_sum_to_one():
    m = 16
    total = sum(qequil.dirichlet_probability(0.37 - 2 * np.pi * s / m, m) for s in range(m))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_write_experiment(tmp_path):
    qequil.write_experiment("correlation_sweep", '{"t_points": 3}', str(tmp_path), "corr")
    assert (tmp_path / "corr.csv").read_text().startswith("beta,t,re,im")
    summary = json.loads((tmp_path / "corr.summary.json").read_text())
    assert summary["count"] == 3 * 3


@pytest.mark.skipif("QEQUIL_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_matches_bindings(tmp_path):
    cfg = tmp_path / "dm.json"
    cfg.write_text(json.dumps({"dims": [3], "samples": 6}))
    cli = os.environ["QEQUIL_CLI"]
    done = subprocess.run(
        [cli, "dm-distance", "--config", str(cfg), "--seed", "11", "--out-dir", str(tmp_path)],
        capture_output=True,
    )
    assert done.returncode == 0, done.stderr
    via_py = qequil.run("random_dm_distance", {"dims": [3], "samples": 6, "seed": 11})
    assert (tmp_path / "dm-distance.csv").read_text() == via_py["csv"]
    bad = tmp_path / "bad.json"
    bad.write_text('{"bogus": true}')
    assert subprocess.run([cli, "dm-distance", "--config", str(bad)], capture_output=True).returncode == 2
