"""Adam updates and learning-rate schedules."""

import numpy as np
import pytest

from decaf.errors import ConfigError
from decaf.numcore import (
    Adam,
    NoamSchedule,
    StaticSchedule,
    Tensor,
    clip_grad_norm,
    parse_schedule,
)


def test_first_step_is_signed_lr():
    p = Tensor(np.array([1.0, -2.0, 3.0]), requires_grad=True)
    p.grad = np.array([0.5, -4.0, 1e-3])
    opt = Adam([p])
    opt.step(lr=0.1)
    # bias-corrected m/sqrt(v) = g/|g| at t=1, up to eps
    assert np.allclose(p.data, [1.0 - 0.1, -2.0 + 0.1, 3.0 - 0.1], atol=1e-4)
    assert opt.t == 1


def test_zero_gradient_leaves_params_unchanged():
    p = Tensor(np.array([1.0, 2.0]), requires_grad=True)
    p.grad = np.zeros(2)
    opt = Adam([p])
    opt.step(lr=0.1)
    assert np.array_equal(p.data, [1.0, 2.0])


def test_none_gradient_skipped():
    p = Tensor(np.array([5.0]), requires_grad=True)
    opt = Adam([p])
    opt.step(lr=0.1)
    assert np.array_equal(p.data, [5.0])


def test_quadratic_convergence():
    rng = np.random.default_rng(0)
    c = rng.standard_normal(6)
    x = Tensor(np.zeros(6), requires_grad=True)
    opt = Adam([x])
    target = Tensor(c)
    for _ in range(200):
        x.zero_grad()
        d = x - target
        (d * d).sum().backward()
        opt.step(lr=0.05)
    assert np.max(np.abs(x.data - c)) < 1e-3


def test_grad_clipping_scales_to_max_norm():
    p = Tensor(np.zeros(4), requires_grad=True)
    p.grad = np.full(4, 10.0)
    norm = clip_grad_norm([p], 5.0)
    assert norm == pytest.approx(20.0)
    assert np.linalg.norm(p.grad) == pytest.approx(5.0)


def test_static_schedule_constant():
    s = StaticSchedule(1e-3)
    for step in (1, 10, 100000):
        assert s.rate(step) == 1e-3


def test_noam_closed_form_at_warmup():
    s = NoamSchedule(256, 4000)
    assert s.rate(4000) == pytest.approx(0.0009882117688026185, rel=1e-12)


def test_noam_monotone_up_then_down():
    s = NoamSchedule(64, 500)
    rates = [s.rate(step) for step in range(1, 2001)]
    for i in range(498):
        assert rates[i] < rates[i + 1]
    for i in range(500, 1999):
        assert rates[i] > rates[i + 1]


def test_schedule_step_zero_rejected():
    with pytest.raises(ConfigError):
        StaticSchedule(1e-3).rate(0)
    with pytest.raises(ConfigError):
        NoamSchedule(64, 100).rate(0)


def test_parse_schedule_round_trip():
    s = parse_schedule("noam:64:4000")
    assert isinstance(s, NoamSchedule) and s.d_model == 64 and s.warmup == 4000
    s = parse_schedule("static:0.001")
    assert isinstance(s, StaticSchedule) and s.rate(3) == 0.001
    with pytest.raises(ConfigError):
        parse_schedule("cosine:1")
