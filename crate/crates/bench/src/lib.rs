pub use bankspread;
