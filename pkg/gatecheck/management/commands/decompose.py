from ._base import GatecheckCommand


class Command(GatecheckCommand):
    help = "KAK decomposition of a two-qubit gate: local factors and interaction coefficients"
    command_name = "decompose"
