"""Detecting invisibility cloaks with the temporal steering parameter.

A qubit (photon polarization or electron spin) crosses a cloaking shell.
Free flight leaves the steering parameter at its maximum; dephasing or a
coupling to a hidden spin pulls it down, which gives the cloak away.
"""

from . import channels, cloak, detector, qops, steering
from .channels import Chain, Dephasing, ExchangeCoupling, Identity, IntegratorConfig, Unitary
from .cloak import CloakGeometry
from .detector import ObservationSet, Record, detect, fit_coupling, fit_dephasing
from .qops import X, Y, Z, MeasurementBasis
from .steering import (
    SteeringEstimate,
    SteeringTask,
    coupling_S_closed_form,
    dephasing_S_closed_form,
    hidden_state_S,
    steering_exact,
    steering_exact_misaligned,
    steering_sampled,
)

__version__ = "0.1.0"
