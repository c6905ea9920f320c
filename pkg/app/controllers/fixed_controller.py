"""
Fixed-beamwidth baseline: same beam at both ends, power from the estimated distance.
"""

import math

from app.bpc.power import fixed_power_control
from app.channel.link_budget import max_gain_db
from app.config.app_config import AppConfig
from app.controllers.base_controller import BaseController, StepContext, estimated_distance, estimated_pointing
from app.controllers.controller_types import FIXED_MODE
from app.errors import ConfigError
from app.models.models import Beamwidth
from app.models.response_models import LinkDecision


class FixedController(BaseController):
    def __init__(self, config: AppConfig) -> None:
        super().__init__(config)
        if config.simulation.fixed_beam_deg is None:
            raise ConfigError("fixed mode needs fixed_beam_deg; resolve it from a heuristic run first")
        self.beam = Beamwidth.from_degrees(config.simulation.fixed_beam_deg)

    def get_mode(self) -> str:
        return FIXED_MODE

    def decide(self, ctx: StepContext) -> LinkDecision:
        view2 = self.peer_view(ctx.stale2, ctx.t)
        view1 = self.peer_view(ctx.stale1, ctx.t)
        ptx = fixed_power_control(self.beam, estimated_distance(ctx.own1, view2), self.link)
        clipped = math.isclose(ptx + float(max_gain_db(self.beam, self.link)), self.link.eirp_max, abs_tol=1e-9)
        return LinkDecision(
            w1=self.beam,
            w2=self.beam,
            ptx=ptx,
            pointing1=estimated_pointing(ctx.own1, view2),
            pointing2=estimated_pointing(ctx.own2, view1),
            eirp_clipped=clipped,
        )
