"""
V2V BPC
Sensor-aided beamwidth and power control for vehicle-to-vehicle mmWave links
"""
