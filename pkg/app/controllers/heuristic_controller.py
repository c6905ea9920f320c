"""
k-sigma beamwidth and power control from exchanged, possibly stale, estimates.
"""

from app.bpc.heuristic import bpc_step
from app.controllers.base_controller import BaseController, StepContext
from app.controllers.controller_types import HEURISTIC_MODE
from app.models.response_models import LinkDecision


class HeuristicController(BaseController):
    """Each vehicle sizes both beams from its own and the delivered peer estimate."""

    def get_mode(self) -> str:
        return HEURISTIC_MODE

    def decide(self, ctx: StepContext) -> LinkDecision:
        lead = bpc_step(ctx.own1, self.peer_view(ctx.stale2, ctx.t), self.link, self.sim.k, self.codebook)
        follow = bpc_step(ctx.own2, self.peer_view(ctx.stale1, ctx.t), self.link, self.sim.k, self.codebook)
        return LinkDecision(
            w1=lead.beamwidth,
            w2=follow.beamwidth,
            ptx=lead.ptx,
            pointing1=lead.pointing,
            pointing2=follow.pointing,
            eirp_clipped=lead.eirp_clipped,
        )
