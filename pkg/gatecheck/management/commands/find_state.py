from ._base import GatecheckCommand


class Command(GatecheckCommand):
    help = "Find a product input that the gate maps to a product output"
    command_name = "find_state"
