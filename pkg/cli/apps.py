from django.apps import AppConfig


class CommandLineConfig(AppConfig):
    name = 'cli'
    verbose_name = 'Command line'
