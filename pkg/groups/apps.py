from django.apps import AppConfig
from django.conf import settings
from django.utils.module_loading import import_string


class GroupsConfig(AppConfig):
    name = 'groups'
    verbose_name = 'Group reasoner'

    def ready(self):
        from .monitors import register_monitor

        for path in getattr(settings, 'ACRE_GROUP_MONITORS', []):
            register_monitor(import_string(path), path)
