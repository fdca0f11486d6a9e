"""CRC codes as error-correcting codes: GRAND decoders, code constructions and BLER simulation."""

__version__ = "0.1.0"
