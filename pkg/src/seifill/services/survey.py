"""Survey every Stein-fillability verdict on a fixed triple of chains."""

from __future__ import annotations

import asyncio
import logging
from collections.abc import Sequence

from ..config import Settings
from ..core.cf import as_chain
from ..core.protocols import FeasibilityOracle
from ..errors import OracleLimitError
from ..models import (
    FeasibilityStatus,
    Presentation,
    SurveyRecord,
    SurveyReport,
    SurveySummary,
)
from ..utils.logging import RunContext
from .abmap import ab_class
from .abmap.oracle import PositiveFactorizationOracle
from .fillability import FillabilityService
from .openbook import translate
from .presentation import enumerate_structures

log = logging.getLogger("seifill.services.survey")


def hole_count(chains: Sequence[Sequence[int]]) -> int:
    """Inner holes of any book on these chains: ``rho^in`` plus one per stabilization."""
    stabs = sum(
        -a - 1 if j == 0 else -a - 2 for chain in chains for j, a in enumerate(chain)
    )
    return stabs + 1


class SurveyRunner:
    """Runs ``decide`` on every structure, optionally checking it with the oracle."""

    def __init__(
        self,
        settings: Settings,
        cross_check: bool = False,
        force: bool = False,
        oracle: FeasibilityOracle | None = None,
    ):
        self.settings = settings
        self.cross_check = cross_check
        self.force = force
        self.oracle = oracle
        self._sem = asyncio.Semaphore(settings.survey_concurrency)

    def _oracle_for(self, chains: Sequence[Sequence[int]]) -> FeasibilityOracle:
        if self.oracle is not None:
            return self.oracle
        holes = hole_count(chains)
        limit = self.settings.max_holes
        if self.cross_check and holes > limit:
            if not self.force:
                raise OracleLimitError(
                    f"cross-check needs {holes} holes, above the limit of {limit}; "
                    "pass --force to run it anyway"
                )
            log.warning("Forcing cross-check on %d holes (limit %d)", holes, limit)
            limit = holes
        return PositiveFactorizationOracle(max_holes=limit)

    async def run(self, chains: Sequence[Sequence[int]]) -> SurveyReport:
        chains = tuple(as_chain(c) for c in chains)
        oracle = self._oracle_for(chains)
        service = FillabilityService(oracle=oracle, max_holes=oracle.max_holes)

        async with RunContext(command="survey") as ctx:
            structures = list(enumerate_structures(chains))
            ctx.info("Surveying structures", count=len(structures))

            async def _task(index: int, presentation: Presentation) -> SurveyRecord:
                async with self._sem:
                    return await asyncio.to_thread(
                        self._record, service, oracle, index, presentation
                    )

            records = await asyncio.gather(
                *[_task(i, p) for i, p in enumerate(structures)]
            )
            summary = self._summarize(records)
            ctx.info(
                "Survey finished",
                fillable=summary.fillable,
                not_fillable=summary.not_fillable,
                disagreements=summary.disagreements,
                elapsed=f"{ctx.elapsed:.2f}s",
            )
        return SurveyReport(chains=chains, records=tuple(records), summary=summary)

    def _record(
        self,
        service: FillabilityService,
        oracle: FeasibilityOracle,
        index: int,
        presentation: Presentation,
    ) -> SurveyRecord:
        rotations = tuple(leg.rotations for leg in presentation.legs)
        with RunContext(record=index) as ctx:
            verdict = service.decide(presentation)
            ctx.debug("Decided structure", rotations=rotations, status=verdict.status.value)
            if not self.cross_check:
                return SurveyRecord(index=index, rotations=rotations, verdict=verdict)

            if verdict.abelian_certificate is not None:
                status = verdict.abelian_certificate.status
            else:
                status = oracle.solve(ab_class(translate(presentation))).status
            agrees = verdict.fillable == (status is FeasibilityStatus.FEASIBLE)
            if not agrees:
                ctx.warning(
                    "Verdict disagrees with oracle",
                    rotations=rotations,
                    verdict=verdict.status.value,
                    oracle=status.value,
                )
            return SurveyRecord(
                index=index, rotations=rotations, verdict=verdict, oracle=status, agrees=agrees
            )

    @staticmethod
    def _summarize(records: Sequence[SurveyRecord]) -> SurveySummary:
        checked = [r for r in records if r.agrees is not None]
        fillable = sum(1 for r in records if r.verdict.fillable)
        agreements = sum(1 for r in checked if r.agrees)
        return SurveySummary(
            total=len(records),
            fillable=fillable,
            not_fillable=len(records) - fillable,
            cross_checked=len(checked),
            agreements=agreements,
            disagreements=len(checked) - agreements,
        )
