from django.apps import AppConfig


class GatecheckConfig(AppConfig):
    name = "gatecheck"
    verbose_name = "Noisy gate detection"
