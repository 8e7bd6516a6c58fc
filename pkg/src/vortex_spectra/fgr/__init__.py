"""Radiative decay models on a periodic box.

Two toy dynamical systems couple finitely many oscillator amplitudes to a
dispersive field; their secular energy drift is governed by the squared
coupling amplitude on a resonant frequency circle.  This subpackage
provides the box/Fourier plumbing, the resonant-circle constants with an
independent numerical oracle, and time integrators for both models with
conservation and wrap-around monitors.
"""

from .box import (Box2D, GaussianSpec, gaussian_field, inverse_unitary_ft,
                  unitary_ft)
from .series import TimeSeries
from .constants import (circle_samples, fgr_constant, fgr_constant_gaussian,
                        fgr_constant_oracle, predicted_decay)
from .model1 import Model1Config, simulate_model1
from .model2 import (Coupling, GammaReport, Model2Config, gamma_model2,
                     simulate_model2)

__all__ = [
    "Box2D",
    "GaussianSpec",
    "gaussian_field",
    "unitary_ft",
    "inverse_unitary_ft",
    "TimeSeries",
    "circle_samples",
    "fgr_constant",
    "fgr_constant_gaussian",
    "fgr_constant_oracle",
    "predicted_decay",
    "Model1Config",
    "simulate_model1",
    "Coupling",
    "Model2Config",
    "simulate_model2",
    "gamma_model2",
    "GammaReport",
]
