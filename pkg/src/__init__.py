# Source root
__version__ = "0.1.0"
__description__ = "Aging uncoupled CTRW limits: laws, samplers, aged FFPE and verification"
