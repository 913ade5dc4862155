"""Service for dispatching verification items to local threads or Celery workers."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional

from celery import group

from app.core.config import settings
from app.schemas.estimate_schema import EstimateMethod, VerificationReport, VolumeEstimate
from app.services.verification_service import verification_service
from app.workers.tasks import verify_item_task

logger = logging.getLogger(__name__)


class BatchService:
    """Service for running experiment items in parallel."""

    def run(self, items: List[Dict[str, Any]], jobs: Optional[int] = None) -> List[VerificationReport]:
        """Reports of every item, sorted so the output never depends on scheduling."""
        jobs = max(1, jobs or settings.JOBS)
        if settings.CELERY_BROKER_URL:
            logger.info(f"Dispatching {len(items)} items to Celery at {settings.CELERY_BROKER_URL}")
            outcomes = group(verify_item_task.s(item) for item in items).apply_async().get(propagate=False)
            results = [
                [self.failure_report(item, outcome).model_dump(mode="json")]
                if isinstance(outcome, Exception) else outcome
                for item, outcome in zip(items, outcomes)
            ]
        else:
            logger.info(f"Running {len(items)} items on {jobs} local worker(s)")
            with ThreadPoolExecutor(max_workers=jobs) as executor:
                results = list(executor.map(self._run_local, items))
        reports = [VerificationReport.model_validate(row) for rows in results for row in rows]
        return sorted(reports, key=lambda report: report.sort_key())

    def _run_local(self, item: Dict[str, Any]) -> List[Dict[str, Any]]:
        try:
            return verification_service.run_item(item)
        except Exception as e:
            logger.error(f"Item {item.get('check')}/{item.get('body_id')} failed: {e}", exc_info=True)
            return [self.failure_report(item, e).model_dump(mode="json")]

    def failure_report(self, item: Dict[str, Any], error: Exception) -> VerificationReport:
        """Failed row for an item that raised instead of reporting."""
        zero = VolumeEstimate(value=0.0, method=EstimateMethod.EXACT)
        return VerificationReport(
            inequality_id=str(item.get("check", "unknown")),
            n=int(item.get("dim", 0)),
            lhs=zero,
            rhs=zero,
            margin=0.0,
            slack=0.0,
            passed=False,
            body_id=item.get("body_id", ""),
            measure_id=self._measure_id(item.get("measure"), int(item.get("dim", 0))),
            seed=item.get("seed"),
            context={"error": f"{type(error).__name__}: {error}"}
        )

    @staticmethod
    def _measure_id(measure: Optional[Dict[str, Any]], dim: int) -> str:
        """Same label a successful run of the item would report."""
        if not measure:
            return ""
        if measure.get("id"):
            return measure["id"]
        if measure.get("kind") == "correlated_gaussian" and measure.get("cov"):
            cov = measure["cov"]
            upper = [cov[i][j] for i in range(len(cov)) for j in range(i, len(cov))]
            return "correlated_gaussian(" + ",".join(f"{float(v):g}" for v in upper) + ")"
        if measure.get("kind") not in ("gaussian", "product_exponential", "lebesgue_box"):
            return measure.get("kind", "")
        params = measure.get("params") or [1.0]
        if len(params) == 1 and dim > 1:
            params = params * dim
        return f"{measure['kind']}(" + ",".join(f"{float(v):g}" for v in params) + ")"


batch_service = BatchService()
