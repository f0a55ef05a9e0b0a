from ._base import GatecheckCommand


class Command(GatecheckCommand):
    help = (
        "Compare CNOT against the CNOT / CNOT(S x S) mixture: optimizer value, "
        "two-state bound, product-input bound and the published figure"
    )
    command_name = "counterexample"
    needs_gate = False
