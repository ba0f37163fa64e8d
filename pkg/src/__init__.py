"""Ada-MAC PAN simulator."""
