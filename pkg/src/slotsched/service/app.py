"""FastAPI service exposing the mechanism and the experiment harness.

The service is stateless: every request carries its full problem or
experiment configuration and the response carries the complete result,
so concurrent clients never interact.  Validation failures surface as
HTTP 422 (pydantic) or 400 (semantic); a mechanism invariant failure is
a 500 because it indicates a solver defect, not bad input.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..core import Instance
from ..mechanism import MechanismInvariantError, run_period
from ..experiments import (
    run_bench,
    run_congestion,
    run_mispriority,
    run_prioritization,
)
from .schemas import (
    BenchRequest,
    CongestionRequest,
    ExperimentResponse,
    HealthResponse,
    InstancePayload,
    MispriorityRequest,
    OutcomePayload,
    PrioritizationRequest,
)

app = FastAPI(
    title="slotsched",
    description="Capacity-constrained slot scheduling with VCG delay pricing",
    version=__version__,
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/allocate", response_model=OutcomePayload)
def allocate(payload: InstancePayload) -> OutcomePayload:
    """Run one mechanism period: optimal allocation plus VCG delays."""
    try:
        instance = Instance.from_json_dict(payload.model_dump())
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    try:
        outcome = run_period(instance)
    except MechanismInvariantError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    return OutcomePayload(**outcome.to_json_dict())


def _run(runner, config, **kwargs) -> ExperimentResponse:
    try:
        files = runner(config, **kwargs)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    except MechanismInvariantError as exc:
        raise HTTPException(status_code=500, detail=str(exc)) from exc
    return ExperimentResponse(files=files)


@app.post("/experiments/prioritization", response_model=ExperimentResponse)
def prioritization(request: PrioritizationRequest) -> ExperimentResponse:
    """Allocated-rank and delay statistics by urgency class versus population."""
    return _run(run_prioritization, request.to_config())


@app.post("/experiments/mispriority", response_model=ExperimentResponse)
def mispriority(request: MispriorityRequest) -> ExperimentResponse:
    """Mean mispriority of FCFS versus the VCG scheduler by population."""
    return _run(run_mispriority, request.to_config())


@app.post("/experiments/congestion", response_model=ExperimentResponse)
def congestion(request: CongestionRequest) -> ExperimentResponse:
    """Multi-day hourly occupancy before and after scheduling, per capacity."""
    return _run(run_congestion, request.to_config(), footfall_csv=request.footfall_csv)


@app.post("/experiments/bench", response_model=ExperimentResponse)
def bench(request: BenchRequest) -> ExperimentResponse:
    """Wall-time sweep of the full mechanism over slot counts."""
    return _run(run_bench, request.to_config())
