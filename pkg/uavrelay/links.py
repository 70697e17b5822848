"""Link, propagation, LoS-state and antenna-role enumerations.

These live in their own module so that :mod:`uavrelay.model` and
:mod:`uavrelay.channel` can both use them without importing each other.
"""

# Distributed under the terms of the Modified BSD License.
from __future__ import annotations

import enum
import typing as t

if t.TYPE_CHECKING:
    from .model import NetworkParams


class Propagation(enum.Enum):
    """Propagation class of a link: air-to-ground or ground-to-ground."""

    A2G = "A2G"
    G2G = "G2G"


class LosState(enum.Enum):
    LOS = "LoS"
    NLOS = "NLoS"

    @property
    def suffix(self) -> str:
        """``L`` or ``N``, as used in parameter names like ``alpha_GL``."""
        return "L" if self is LosState.LOS else "N"


class Role(enum.Enum):
    """Whether a gain applies to the serving transmitter or an interferer."""

    TARGET = "target"
    INTERFERENCE = "interference"


class LinkKind(enum.Enum):
    """The three links of the two-hop network.

    ``SD`` is TBS to UE, ``SR`` is TBS to relay, ``RD`` is relay to UE.
    """

    SD = "SD"
    SR = "SR"
    RD = "RD"

    @property
    def propagation(self) -> Propagation:
        return Propagation.G2G if self is LinkKind.SD else Propagation.A2G

    @property
    def transmitter(self) -> str:
        """Which point process the transmitters of this link belong to, ``T`` or ``R``."""
        return "R" if self is LinkKind.RD else "T"

    def density(self, params: NetworkParams) -> float:
        """Density of the transmitter process of this link [1/m²]."""
        return params.lambda_R if self is LinkKind.RD else params.lambda_T

    def power(self, params: NetworkParams) -> float:
        """Transmit power of this link [W]."""
        return params.P_R if self is LinkKind.RD else params.P_T

    def gain(self, params: NetworkParams, role: Role) -> float:
        """Beamforming gain of this link for a serving (target) or interfering transmitter."""
        target = role is Role.TARGET
        if self is LinkKind.SD:
            return params.G_TM if target else params.G_Tm
        if self is LinkKind.SR:
            return params.G_TM * params.G_RM if target else params.G_Tm * params.G_Rm
        return params.G_RM if target else params.G_Rm
