from ._base import GatecheckCommand


class Command(GatecheckCommand):
    help = "Simulate the local discrimination protocol shot by shot (JSON summary or CSV outcome table)"
    command_name = "simulate"
