"""apxsim: embedded interactive physics simulations from raster diagrams.

Subpackages mirror the pipeline stages: ``vision`` (raster to vector),
``kinematics`` (rigid bodies), ``optics`` (thin lens / mirror), ``circuit``
(netlist extraction + DC solve), ``animation`` (path following), ``scene``
(authoring document model), ``service`` (HTTP/WebSocket server) and ``cli``.
"""

__version__ = "0.1.0"
