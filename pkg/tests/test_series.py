import json
import math

import numpy as np
import pytest

from spinmirror.errors import ValidationError
from spinmirror.jacobi_core import SymmetricChainSpec
from spinmirror.series import CorrelationSeries, chain_hash


def test_csv_round_trip_is_exact():
    t = np.array([0.0, 0.1, math.pi])
    v = np.array([0.25 + 0j, 1 / 3 - 1e-17j, -0.1 + 0.2j])
    series = CorrelationSeries("xx", (19, 19), math.inf, t, v)
    back = CorrelationSeries.from_csv(series.to_csv())
    np.testing.assert_array_equal(back.times, t)
    np.testing.assert_array_equal(back.values, v)
    assert back.temperature == math.inf
    assert back.sites == (19, 19)


def test_csv_header_carries_chain_hash():
    chain = SymmetricChainSpec.homogeneous(4)
    text = CorrelationSeries("zz", (0, 3), 0.0, [], []).to_csv(chain)
    first, second = text.splitlines()
    meta = json.loads(first[1:])
    assert meta["chain_hash"] == chain_hash(chain)
    assert second == "t,re,im"


def test_chain_hash_is_content_based():
    a = SymmetricChainSpec.homogeneous(4)
    b = SymmetricChainSpec.homogeneous(4, 1.0 + 1e-15)
    assert chain_hash(a) == chain_hash(SymmetricChainSpec.homogeneous(4))
    assert chain_hash(a) != chain_hash(b)


def test_validation():
    with pytest.raises(ValidationError):
        CorrelationSeries("zz", (0, 0), 0.0, [0.0, 1.0], [1.0])
    with pytest.raises(ValidationError):
        CorrelationSeries("zz", (0, 0), 0.0, [1.0, 0.0], [1.0, 1.0])
    with pytest.raises(ValidationError):
        CorrelationSeries.from_csv("t,re,im\n")


def test_json_form():
    d = CorrelationSeries("zz", (0, 1), 2.0, [0.0], [0.5 + 0.25j]).to_dict()
    assert d == {"observable": "zz", "sites": [0, 1], "temperature": 2.0, "t": [0.0], "re": [0.5], "im": [0.25]}
