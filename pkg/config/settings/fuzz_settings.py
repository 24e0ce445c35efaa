from pydantic import BaseModel, root_validator

MAX_GRID_SIDE = 5
MAX_DEMANDS = 6


class FuzzSettings(BaseModel):
    width: int = 3
    height: int = 3
    demands: int = 3
    max_capacity: int = 2
    keep_probability: float = 0.6

    @root_validator(skip_on_failure=True)
    def check_ranges(cls, values):  # pylint: disable=no-self-argument
        for side in ("width", "height"):
            if not 2 <= values[side] <= MAX_GRID_SIDE:
                raise ValueError(f"{side} must be between 2 and {MAX_GRID_SIDE}")
        if not 0 <= values["demands"] <= MAX_DEMANDS:
            raise ValueError(f"demands must be between 0 and {MAX_DEMANDS}")
        if values["max_capacity"] < 1:
            raise ValueError("max_capacity must be at least 1")
        if not 0.0 <= values["keep_probability"] <= 1.0:
            raise ValueError("keep_probability must lie in [0, 1]")
        return values
