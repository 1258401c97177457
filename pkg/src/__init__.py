"""fracperim: fractional mean curvature, contribution from infinity and stickiness experiments."""

__version__ = "0.3.0"
