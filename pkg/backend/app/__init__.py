# Backend application package

