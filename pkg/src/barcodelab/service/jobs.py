"""Analysis jobs: synchronous under a size cutoff, pooled threads above it.

Results persist in the store and stay retrievable by id (shareable URLs);
stale jobs are pruned on access after the retention window.
"""

from __future__ import annotations

import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timedelta, timezone

from barcodelab.model.audit import now_iso

SYNC_CUTOFF_RECORDS = 2000
RETENTION_DAYS = 30


class JobRunner:
    def __init__(self, platform, sync_cutoff: int = SYNC_CUTOFF_RECORDS, workers: int = 2):
        self.platform = platform
        self.sync_cutoff = sync_cutoff
        self._executor = ThreadPoolExecutor(max_workers=workers)

    def launch(self, tool: str, run, size_hint: int = 0, params: dict | None = None) -> dict:
        """run: zero-arg callable producing the result payload."""
        job_id = uuid.uuid4().hex[:16]
        doc = {
            "job_id": job_id,
            "tool": tool,
            "params": params or {},
            "status": "queued",
            "created_at": now_iso(),
            "completed_at": None,
            "result": None,
            "error": None,
        }
        self.platform.store.put_job(doc)
        if size_hint <= self.sync_cutoff:
            self._execute(job_id, run)
        else:
            self._executor.submit(self._execute, job_id, run)
        return self.platform.store.get_job(job_id)

    def _execute(self, job_id: str, run) -> None:
        doc = self.platform.store.get_job(job_id)
        doc["status"] = "running"
        self.platform.store.put_job(doc)
        try:
            result = run()
            doc["status"] = "done"
            doc["result"] = result
        except Exception as exc:  # jobs report failures, never crash the worker
            doc["status"] = "error"
            doc["error"] = f"{type(exc).__name__}: {exc}"
        doc["completed_at"] = now_iso()
        self.platform.store.put_job(doc)

    def get(self, job_id: str) -> dict | None:
        doc = self.platform.store.get_job(job_id)
        if doc is None:
            return None
        if doc.get("completed_at"):
            completed = datetime.fromisoformat(doc["completed_at"].replace("Z", "+00:00"))
            if datetime.now(timezone.utc) - completed > timedelta(days=RETENTION_DAYS):
                return None
        return doc
