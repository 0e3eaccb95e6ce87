from __future__ import annotations
from datetime import datetime, timezone
from typing import Any

from sqlalchemy import JSON, DateTime, Float, Integer, String, Text
from sqlalchemy.orm import DeclarativeBase, Mapped, mapped_column


class Base(DeclarativeBase):
    pass


class RunRecord(Base):
    """One experiment run of a sweep."""

    __tablename__ = "runs"
    id: Mapped[int] = mapped_column(Integer, primary_key=True, autoincrement=True)
    grid_index: Mapped[int] = mapped_column(Integer, index=True)
    run_name: Mapped[str] = mapped_column(String(128), unique=True)
    seed: Mapped[str] = mapped_column(String(32))  # u64 does not fit SQLite INTEGER
    status: Mapped[str] = mapped_column(String(16))
    params: Mapped[dict[str, Any]] = mapped_column(JSON)
    mean_abs: Mapped[float | None] = mapped_column(Float, nullable=True)
    rms: Mapped[float | None] = mapped_column(Float, nullable=True)
    max_abs: Mapped[float | None] = mapped_column(Float, nullable=True)
    acceptance_rate: Mapped[float | None] = mapped_column(Float, nullable=True)
    final_f: Mapped[float | None] = mapped_column(Float, nullable=True)
    error: Mapped[str | None] = mapped_column(Text, nullable=True)
    manifest_path: Mapped[str] = mapped_column(String(512))
    created_at: Mapped[datetime] = mapped_column(
        DateTime, default=lambda: datetime.now(timezone.utc)
    )
