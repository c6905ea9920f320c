"""
Outage-constrained benchmark with true geometry and error statistics.
"""

import math
from typing import Dict

from app.channel.link_budget import max_gain_db
from app.config.app_config import AppConfig
from app.controllers.base_controller import BaseController, StepContext, estimated_pointing
from app.controllers.controller_types import OPTIMIZER_MODE
from app.models.response_models import LinkDecision, OptProblem, OptSolution
from app.optimizer.solver import optimize


class OptimizerController(BaseController):
    """Minimum-power beams for the misalignment budget; pointing uses current estimates.

    Solutions are cached per step index: the problem at a step depends only on
    the true states and the error covariances, not on the error draws.
    """

    def __init__(self, config: AppConfig) -> None:
        super().__init__(config)
        self._solutions: Dict[int, OptSolution] = {}

    def get_mode(self) -> str:
        return OPTIMIZER_MODE

    @property
    def needs_peer(self) -> bool:
        return False

    def problem(self, ctx: StepContext) -> OptProblem:
        return OptProblem(
            p1=ctx.p1,
            q1=ctx.q1,
            p2=ctx.p2,
            q2=ctx.q2,
            C_p1=ctx.own1.C_p_hat,
            C_p2=ctx.own2.C_p_hat,
            C_gamma1=ctx.C_gamma1,
            C_gamma2=ctx.C_gamma2,
            p_out_max=self.sim.p_out_max,
            link=self.link,
        )

    def solve(self, ctx: StepContext) -> OptSolution:
        if ctx.k not in self._solutions:
            self._solutions[ctx.k] = optimize(self.problem(ctx))
        return self._solutions[ctx.k]

    def decide(self, ctx: StepContext) -> LinkDecision:
        sol = self.solve(ctx)
        clipped = math.isclose(sol.ptx + float(max_gain_db(sol.w1, self.link)), self.link.eirp_max, abs_tol=1e-9)
        return LinkDecision(
            w1=sol.w1,
            w2=sol.w2,
            ptx=sol.ptx,
            pointing1=estimated_pointing(ctx.own1, ctx.own2),
            pointing2=estimated_pointing(ctx.own2, ctx.own1),
            eirp_clipped=clipped,
            feasible=sol.feasible,
        )
