import math

import numpy as np
import pytest

import ultraslow as us

K1 = us.MemoryKernel.distributed()
K2 = us.MemoryKernel.distributed_prabhakar(0.5, 0.5, 1.0)


def test_msd1_value():
    assert us.msd1(1.0) == pytest.approx(2.3471260544494538699, rel=1e-14)
    # 2(C - e Ei(-1)) through an independent Ei
    assert us.msd1(1.0) == pytest.approx(2 * (np.euler_gamma - math.e * us.exp_integral_ei(-1.0)), rel=1e-14)


def test_kernel_and_partner():
    assert us.kernel(K2, 1.0).value == pytest.approx(0.920697458353, rel=1e-11)
    assert us.sonnine_residual(K1, 0.5) < 1e-10
    assert us.partner(K1, 2.0).value > 0


def test_moments_and_routes():
    closed = us.moment(K2, 2, 1.0)
    quad = us.moment(K2, 2, 1.0, route="quadrature")
    assert closed.value == pytest.approx(quad.value, rel=1e-8)
    k, skew = us.kurtosis(K1, 1.0)
    assert k.value == pytest.approx(4.51059623281789597, rel=1e-10)
    assert skew == 0.0
    with pytest.raises(us.RouteUnavailable):
        us.moment(us.MemoryKernel.caputo(0.5), 2, 1.0)


def test_pdf():
    ilt = us.pdf(K1, 0.5, 1.0).value
    series = us.pdf(K1, 0.5, 1.0, route="series").value
    assert ilt == pytest.approx(series, abs=1e-8)
    assert us.pdf(K2, 0.3, 1.0).value == us.pdf(K2, -0.3, 1.0).value


def test_spectral_mass():
    assert 8 * us.spectral_mass(0.4, 3.0, 1.2).value == pytest.approx(1.0, abs=1e-10)


def test_check_cm():
    ok = us.check_cm(lambda s: 1 / s, 0.1, 10.0)
    assert ok["verdict"] == "ConsistentWithCM"
    bad = us.check_cm(math.exp, 0.1, 2.0, max_order=1)
    assert bad["verdict"] == "ViolationFound"
    assert "not proof" in bad["note"]


def test_fd_solve():
    s = us.fd_solve(K1, 0.5, nx=201)
    assert isinstance(s["x"], np.ndarray)
    assert abs(s["mass"][-1] - 1) < 1e-3
    assert s["msd"][-1] == pytest.approx(us.msd1(0.5), rel=0.03)


def test_errors():
    with pytest.raises(ValueError):
        us.msd1(-1.0)
    with pytest.raises(us.DomainError):
        us.pdf(K1, 0.0, 1.0, route="nope")
