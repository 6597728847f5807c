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

"""Python access to the qequil experiment drivers."""

import json

from ._qequil import (
    ConfigError,
    QequilError,
    approximate_chain,
    dirichlet_probability,
    exact_chain,
    gibbs_weights,
    stationary_distribution,
    trace_norm,
    write_experiment,
)
from . import _qequil

__all__ = [
    "ConfigError",
    "QequilError",
    "approximate_chain",
    "default_config",
    "dirichlet_probability",
    "exact_chain",
    "gibbs_weights",
    "run",
    "stationary_distribution",
    "trace_norm",
    "write_experiment",
]


def default_config(kind):
    """Default configuration for ``kind`` as a dict."""
    return json.loads(_qequil.default_config(kind))


def run(kind, config=None):
    """Runs one experiment; ``config`` may be a dict or JSON text.

    The returned dict carries ``columns``, ``rows``, ``csv`` and the parsed ``summary``.
    """
    if config is None:
        text = "{}"
    elif isinstance(config, str):
        text = config
    else:
        text = json.dumps(config)
    out = _qequil.run_experiment(kind, text)
    out["summary"] = json.loads(out["summary"])
    return out
