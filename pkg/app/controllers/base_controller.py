"""
Base functionality for the per-step link controllers.
"""

import math
from abc import ABC, abstractmethod
from typing import List, Optional

import numpy as np
import structlog
from pydantic import BaseModel, ConfigDict, Field

from app.bpc.heuristic import initial_decision
from app.config.app_config import AppConfig
from app.geometry.frames import los_angles, relative_position
from app.models.models import FloatArray, LosAngles, PeerEstimate
from app.models.response_models import LinkDecision

logger = structlog.get_logger(__name__)

# before the first exchange the leader looks backwards and the follower forwards
LEAD_DEFAULT_POINTING = LosAngles(math.pi, 0.0)
FOLLOW_DEFAULT_POINTING = LosAngles(0.0, 0.0)


class StepContext(BaseModel):
    """Everything a controller may use at one step."""

    k: int = Field(ge=0, description="Step index")
    t: float = Field(description="Step time, s")
    own1: PeerEstimate = Field(description="Vehicle 1's current estimate of itself")
    own2: PeerEstimate = Field(description="Vehicle 2's current estimate of itself")
    stale1: Optional[PeerEstimate] = Field(default=None, description="Vehicle 1's estimate as delivered to vehicle 2")
    stale2: Optional[PeerEstimate] = Field(default=None, description="Vehicle 2's estimate as delivered to vehicle 1")
    p1: FloatArray = Field(description="True position of vehicle 1")
    q1: FloatArray = Field(description="True orientation of vehicle 1")
    p2: FloatArray = Field(description="True position of vehicle 2")
    q2: FloatArray = Field(description="True orientation of vehicle 2")
    C_gamma1: FloatArray = Field(description="Euler covariance of vehicle 1's estimate, rad^2")
    C_gamma2: FloatArray = Field(description="Euler covariance of vehicle 2's estimate, rad^2")

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @property
    def delivered(self) -> bool:
        return self.stale1 is not None and self.stale2 is not None


class BaseController(ABC):
    """Abstract base class for link controllers."""

    def __init__(self, config: AppConfig) -> None:
        self.config = config
        self.link = config.link
        self.sim = config.simulation
        self.codebook: Optional[List[float]] = (
            [math.radians(c) for c in self.sim.codebook_deg] if self.sim.codebook_deg else None
        )
        logger.debug(f"Initialized {self.__class__.__name__}", mode=self.get_mode())

    @abstractmethod
    def get_mode(self) -> str:
        """Get the mode name this controller implements."""
        pass

    @abstractmethod
    def decide(self, ctx: StepContext) -> LinkDecision:
        """Beamwidths, Tx power and pointing for one step."""
        pass

    @property
    def needs_peer(self) -> bool:
        """Whether decisions wait for the first delayed peer estimate."""
        return True

    def peer_view(self, stale: PeerEstimate, t: float) -> PeerEstimate:
        if self.sim.extrapolate_peer:
            return stale.advanced(t - stale.timestamp)
        return stale

    def warmup(self, ctx: StepContext) -> LinkDecision:
        """Widest beams at the EIRP-limited power until estimates are exchanged."""
        lead = initial_decision(self.link, LEAD_DEFAULT_POINTING)
        follow = initial_decision(self.link, FOLLOW_DEFAULT_POINTING)
        return LinkDecision(
            w1=lead.beamwidth,
            w2=follow.beamwidth,
            ptx=lead.ptx,
            pointing1=lead.pointing,
            pointing2=follow.pointing,
        )

    def step(self, ctx: StepContext) -> LinkDecision:
        if self.needs_peer and not ctx.delivered:
            return self.warmup(ctx)
        return self.decide(ctx)


def estimated_pointing(own: PeerEstimate, peer: PeerEstimate) -> LosAngles:
    return los_angles(relative_position(own.p_hat, peer.p_hat, own.q_hat))


def estimated_distance(own: PeerEstimate, peer: PeerEstimate) -> float:
    return float(np.linalg.norm(peer.p_hat - own.p_hat))
