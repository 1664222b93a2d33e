"""The published 3x3 numerical example, embedded as printed (8 decimals).

X = Y = {1, 2, 3}, |T| = 2.  Y carries its labels as numeric values, which the
variance functional uses.  The printed joint sums to 1.00000001 because of
rounding, so :func:`example_joint` rescales it to unit mass.
"""

import numpy as np

from .prob import Alphabet, Channel, Joint

JOINT = np.array([
    [0.02286551, 0.06322060, 0.21391389],
    [0.20989825, 0.03393804, 0.15616371],
    [0.10464454, 0.03489356, 0.16046191],
])

INITIAL_ENCODER = np.array([
    [0.46707838, 0.53292162],
    [0.89856339, 0.10143661],
    [0.45165810, 0.54834190],
])

# converged encoders as printed, keyed by the iteration count printed with them
CONVERGED_108 = np.array([
    [0.20248578, 0.79751422],
    [0.95825068, 0.04174932],
    [0.77937897, 0.22062103],
])

CONVERGED_81 = np.array([
    [0.33757386, 0.66242614],
    [0.99267856, 0.00732144],
    [0.93976497, 0.06023503],
])

TARGET_I_XT = 0.2496
EPSILON = 1e-9
BETA_RANGE = (0.0, 300.0)

# pairing stated in the text: Shannon -> 108 iterations, squared error -> 81
STATED = {
    "shannon": ("p108", CONVERGED_108, 108),
    "variance": ("p81", CONVERGED_81, 81),
}
PRINTED = {"p108": CONVERGED_108, "p81": CONVERGED_81}

X_ALPHABET = Alphabet(("1", "2", "3"), (1.0, 2.0, 3.0))
Y_ALPHABET = Alphabet(("1", "2", "3"), (1.0, 2.0, 3.0))
T_ALPHABET = Alphabet.of_size(2)


def example_joint() -> Joint:
    return Joint(X_ALPHABET, Y_ALPHABET, JOINT / JOINT.sum())


def initial_encoder() -> Channel:
    return Channel(X_ALPHABET, T_ALPHABET, INITIAL_ENCODER)
