from firetwin.weather.models import PasquillClass, WeatherSample, wind_vector
from firetwin.weather.providers import (
    FixtureWeatherProvider,
    HttpWeatherAdapter,
    RawObservation,
    WeatherCache,
    WeatherProvider,
    fetch_weather,
)
from firetwin.weather.solar import solar_elevation_deg
from firetwin.weather.stability import stability_class

__all__ = [
    "FixtureWeatherProvider",
    "HttpWeatherAdapter",
    "PasquillClass",
    "RawObservation",
    "WeatherCache",
    "WeatherProvider",
    "WeatherSample",
    "fetch_weather",
    "solar_elevation_deg",
    "stability_class",
    "wind_vector",
]
