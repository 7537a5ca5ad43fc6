"""Prediction validation against sensor data and AQI conversion."""

from firetwin.validate.aqi import AQI_ANCHORS, AQI_MAX, pm25_to_aqi
from firetwin.validate.detection import (
    DetectionReport,
    SensorDetection,
    SensorReading,
    detection_report,
    highest_band,
    load_readings,
    sensors_in_footprint,
)

__all__ = [
    "AQI_ANCHORS",
    "AQI_MAX",
    "DetectionReport",
    "SensorDetection",
    "SensorReading",
    "detection_report",
    "highest_band",
    "load_readings",
    "pm25_to_aqi",
    "sensors_in_footprint",
]
