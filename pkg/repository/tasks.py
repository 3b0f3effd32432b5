import logging

from celery import shared_task
from django.conf import settings

from .fetch import fetch_repository
from .store import load_store
from .transport import FetchFailed

logger = logging.getLogger(__name__)


@shared_task(
    bind=True,
    max_retries=5,
    default_retry_delay=30,
    retry_backoff=True,
    retry_backoff_max=600,
    retry_jitter=True,
    soft_time_limit=240,
    time_limit=300,
)
def fetch_repository_task(self, source: str, store_root: str = None):
    """
    Fetch a repository into the store in the background.

    Unreachable repositories are retried with backoff; per-protocol
    failures are part of the returned summary and are not retried.
    """
    store_root = store_root or settings.ACRE_STORE
    logger.info(f"Fetch task started for {source}", extra={
        "source": source,
        "store": store_root,
        "retry_count": self.request.retries,
    })
    store = load_store(store_root)
    try:
        result = fetch_repository(source, store)
    except FetchFailed as e:
        if e.transient:
            logger.warning(f"Repository {source} unreachable (will retry)", extra={
                "source": source,
                "error": str(e),
                "retry_count": self.request.retries,
            })
            raise self.retry(exc=e)
        logger.error(f"Repository {source} could not be read", extra={"source": source, "error": str(e)})
        raise
    return result.as_dict()
