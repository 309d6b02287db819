# file_utils.py

import csv
import json
import logging
import threading
from pathlib import Path
from typing import Any, Iterable, Sequence, Union

from errors import ValidationError

logger = logging.getLogger(__name__)


class FileUtils:
    """Reads JSON inputs and writes deterministic JSON and CSV outputs."""

    def __init__(self):
        self._lock = threading.Lock()

    def ensure_folder_exists(self, folder_path: Union[Path, str]) -> None:
        """Ensure a folder exists, creating it if necessary."""
        folder_path = Path(folder_path).resolve()
        with self._lock:
            try:
                if not folder_path.exists():
                    folder_path.mkdir(parents=True, exist_ok=True)
                    logger.info(f"Created folder: {folder_path}")
            except Exception as e:
                logger.error(f"Error creating folder {folder_path}: {str(e)}")
                raise

    def read_json(self, file_path: Union[Path, str]) -> Any:
        file_path = Path(file_path)
        if not file_path.is_file():
            raise ValidationError(f"Input file not found: {file_path}", subject=str(file_path))
        try:
            with file_path.open(encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise ValidationError(f"Input file {file_path} is not valid JSON: {str(e)}", subject=str(file_path))

    def write_json(self, file_path: Union[Path, str], payload: Any) -> Path:
        """Sorted keys, 2-space indent, trailing newline."""
        file_path = Path(file_path)
        self.ensure_folder_exists(file_path.parent)
        with file_path.open('w', encoding='utf-8', newline='\n') as f:
            json.dump(payload, f, sort_keys=True, indent=2, ensure_ascii=False)
            f.write('\n')
        logger.info(f"Wrote {file_path}")
        return file_path

    def write_csv(self, file_path: Union[Path, str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        file_path = Path(file_path)
        self.ensure_folder_exists(file_path.parent)
        with file_path.open('w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        logger.info(f"Wrote {file_path}")
        return file_path

    @staticmethod
    def sibling_path(file_path: Union[Path, str], suffix: str) -> Path:
        """out/result.json -> out/result_<suffix>.csv"""
        file_path = Path(file_path)
        return file_path.with_name(f"{file_path.stem}_{suffix}.csv")
