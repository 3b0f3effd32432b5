import os
from celery import Celery

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "config.settings")

app = Celery("acre")
app.config_from_object("django.conf:settings", namespace="CELERY")
app.autodiscover_tasks()

# Start a fetch worker with:
#   celery -A config worker -Q protocol_fetch,default -c 4
