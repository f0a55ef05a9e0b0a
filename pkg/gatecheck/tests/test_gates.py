import json
import tempfile
from pathlib import Path

import numpy as np
import yaml
from django.test import SimpleTestCase

from gatecheck.channels import CNOT, Depolarized, MixedUnitary
from gatecheck.exceptions import GateSpecError, InvalidInputError, ProbabilityError, UnitarityError
from gatecheck.gates import (
    channel_from_document,
    gate_description,
    gate_from_value,
    gate_names,
    load_gate_document,
    named_gate,
    parse_matrix,
    resolve_gate,
)

SWAP_ROWS = [
    [[1, 0], [0, 0], [0, 0], [0, 0]],
    [[0, 0], [0, 0], [1, 0], [0, 0]],
    [[0, 0], [1, 0], [0, 0], [0, 0]],
    [[0, 0], [0, 0], [0, 0], [1, 0]],
]


class GateLibraryTests(SimpleTestCase):
    def test_known_names(self):
        self.assertEqual(gate_names(), ["cnot", "cz", "identity", "iswap", "sqrt_swap", "swap"])

    def test_lookup_is_case_insensitive(self):
        np.testing.assert_array_equal(named_gate("CNOT"), CNOT)
        self.assertIn("Controlled-NOT", gate_description("cnot"))
        self.assertIsNone(gate_description("noisy.json"))

    def test_unknown_name_lists_alternatives(self):
        with self.assertRaisesMessage(GateSpecError, "Known gates: cnot"):
            named_gate("toffoli")

    def test_sqrt_swap_squares_to_swap(self):
        root = named_gate("sqrt_swap")
        np.testing.assert_allclose(root @ root, named_gate("swap"), atol=1e-12)


class ParseMatrixTests(SimpleTestCase):
    def test_pairs(self):
        np.testing.assert_array_equal(parse_matrix(SWAP_ROWS), named_gate("swap"))

    def test_malformed_entries(self):
        with self.assertRaises(GateSpecError):
            parse_matrix([[1, 0, 0, 0]] * 4)

    def test_non_unitary(self):
        rows = [[[2, 0] if i == j else [0, 0] for j in range(4)] for i in range(4)]
        with self.assertRaises(UnitarityError):
            parse_matrix(rows)

    def test_value_forms(self):
        for value in ("swap", {"matrix": SWAP_ROWS}, SWAP_ROWS):
            np.testing.assert_array_equal(gate_from_value(value), named_gate("swap"))
        with self.assertRaises(GateSpecError):
            gate_from_value(42)


class GateDocumentTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def write(self, name, document, dump=json.dumps):
        path = self.dir / name
        path.write_text(dump(document), encoding="utf-8")
        return path

    def test_json_document(self):
        path = self.write("gate.json", {"gate": {"matrix": SWAP_ROWS}})
        gate, document = resolve_gate(str(path))
        np.testing.assert_array_equal(gate, named_gate("swap"))
        self.assertIn("gate", document)

    def test_yaml_document(self):
        path = self.write("gate.yaml", {"gate": "cnot", "noise": {"type": "depolarized", "p": 0.2}}, yaml.safe_dump)
        gate, document = resolve_gate(str(path))
        channel = channel_from_document(document, gate, default_p=None)
        self.assertIsInstance(channel, Depolarized)
        self.assertEqual(channel.p, 0.2)

    def test_named_gate_has_no_document(self):
        _, document = resolve_gate("swap")
        self.assertIsNone(document)

    def test_missing_and_unsupported_files(self):
        with self.assertRaisesMessage(GateSpecError, "File not found"):
            load_gate_document(self.dir / "absent.json")
        path = self.write("gate.txt", {"gate": "cnot"})
        with self.assertRaisesMessage(GateSpecError, "Unsupported file format"):
            load_gate_document(path)
        with self.assertRaisesMessage(GateSpecError, "is a directory"):
            resolve_gate(str(self.dir))

    def test_broken_json(self):
        path = self.dir / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with self.assertRaises(GateSpecError):
            load_gate_document(path)

    def test_document_needs_gate_field(self):
        path = self.write("empty.json", {"noise": None})
        with self.assertRaises(InvalidInputError):
            load_gate_document(path)


class ChannelDocumentTests(SimpleTestCase):
    def test_default_is_depolarized(self):
        channel = channel_from_document(None, CNOT, 0.3)
        self.assertIsInstance(channel, Depolarized)
        self.assertEqual(channel.p, 0.3)

    def test_mixed_unitary(self):
        document = {
            "gate": "cnot",
            "noise": {
                "type": "mixed_unitary",
                "branches": [{"gate": "cnot", "probability": 0.75}, {"gate": "cz", "probability": 0.25}],
            },
        }
        channel = channel_from_document(document, CNOT, None)
        self.assertIsInstance(channel, MixedUnitary)
        np.testing.assert_allclose(channel.probabilities, [0.75, 0.25])

    def test_bad_noise(self):
        for noise in ("depolarized", {"type": "amplitude_damping"}, {"type": "mixed_unitary", "branches": []}):
            with self.subTest(noise=noise), self.assertRaises(GateSpecError):
                channel_from_document({"gate": "cnot", "noise": noise}, CNOT, 0.1)

    def test_branch_without_probability(self):
        document = {"gate": "cnot", "noise": {"type": "mixed_unitary", "branches": [{"gate": "cnot"}]}}
        with self.assertRaises(GateSpecError):
            channel_from_document(document, CNOT, None)

    def test_non_numeric_probability(self):
        branches = [{"gate": "cnot", "probability": "half"}, {"gate": "cz", "probability": 0.5}]
        document = {"gate": "cnot", "noise": {"type": "mixed_unitary", "branches": branches}}
        with self.assertRaisesMessage(GateSpecError, "numeric 'probability'"):
            channel_from_document(document, CNOT, None)

    def test_branch_probabilities_keep_their_own_error(self):
        branches = [{"gate": "cnot", "probability": 0.5}, {"gate": "cz", "probability": 0.2}]
        document = {"gate": "cnot", "noise": {"type": "mixed_unitary", "branches": branches}}
        with self.assertRaisesMessage(ProbabilityError, "sum to"):
            channel_from_document(document, CNOT, None)
