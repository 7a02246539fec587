import os
import pathlib
import tempfile
from typing import Union


def write_text_atomically(path: Union[str, pathlib.Path], text: str):
    # write next to the target then rename so readers never see a partial file
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, 'wt', newline='\n') as f:
            f.write(text)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise
