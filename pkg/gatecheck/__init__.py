"""Discriminate a two-qubit gate from its depolarized counterpart with local resources."""
